#include "rhj/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rhj {

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; value is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {
double corrected_p(double d, double ne) {
  const double s = std::sqrt(ne);
  return kolmogorov_survival((s + 0.12 + 0.11 / s) * d);
}
}  // namespace

KsResult ks_uniform(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double u = std::clamp(sample[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
  }
  return {d, corrected_p(d, n), n};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, corrected_p(d, ne), ne};
}

Moments moments(std::span<const double> x) {
  Moments m;
  m.n = x.size();
  if (x.empty()) return m;
  const auto n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  m.mean = sum / n;
  double s2 = 0.0, s4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  m.variance = x.size() > 1 ? s2 / (n - 1.0) : 0.0;
  m.mean_se = std::sqrt(m.variance / n);
  const double m2 = s2 / n, m4 = s4 / n;
  m.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return m;
}

}  // namespace rhj
