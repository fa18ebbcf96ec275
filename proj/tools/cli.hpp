#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhj/path.hpp"

namespace rhj::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kMarginError = 3, kCheckFailed = 4 };

/// Bad command line or configuration file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigVersion = 1;

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Alternating walk of `segments` unit-time pieces with amplitudes in [lo, hi], reduced.
SampledPath random_reduced_path(std::mt19937_64& rng, int segments, double lo = 0.1, double hi = 1.0);

}  // namespace rhj::cli
