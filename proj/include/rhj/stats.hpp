#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rhj {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double effective_n = 0.0;
};

/// Asymptotic Kolmogorov survival function Q(l) = 2 sum (-1)^(k-1) exp(-2 k^2 l^2).
double kolmogorov_survival(double lambda);

/// One-sample test against Uniform[0,1]; p-value uses Stephens' finite-n correction.
KsResult ks_uniform(std::vector<double> sample);
/// Two-sample test.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;     // unbiased
  double mean_se = 0.0;      // sqrt(variance / n)
  double variance_se = 0.0;  // sqrt((m4 - variance^2) / n)
};

Moments moments(std::span<const double> x);

}  // namespace rhj
