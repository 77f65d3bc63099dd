#pragma once

// Reference implementations for the statistics helpers.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "common/random.hpp"

namespace oracle {

// Exact two-sided binomial tail by direct summation.
inline double binomial_two_sided(size_t b, size_t c) {
  size_t n = b + c, k = std::min(b, c);
  long double tail = 0;
  for (size_t i = 0; i <= k; ++i) {
    long double lc = std::lgamma(n + 1.0L) - std::lgamma(i + 1.0L) - std::lgamma(n - i + 1.0L);
    tail += std::exp(lc - n * std::log(2.0L));
  }
  return std::min(1.0, static_cast<double>(2 * tail));
}

// Upper tail of Student's t by Simpson integration of the density.
inline double t_upper_tail(double t, double df) {
  auto pdf = [df](double x) {
    return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI) *
           std::pow(1 + x * x / df, -(df + 1) / 2);
  };
  // integrate pdf from 0 to |t| and subtract from one half
  const int steps = 20000;
  double a = 0, b = std::fabs(t), h = (b - a) / steps, s = pdf(a) + pdf(b);
  for (int i = 1; i < steps; ++i) s += pdf(a + i * h) * (i % 2 ? 4 : 2);
  return 0.5 - s * h / 3;
}

// Percentile bootstrap of the mean written out from the definition.
inline std::pair<double, double> bootstrap_reference(const std::vector<double>& x, size_t resamples, uint64_t seed,
                                                     double level) {
  chronokg::Rng rng(seed);
  std::vector<double> means;
  for (size_t r = 0; r < resamples; ++r) {
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[rng.index(x.size())];
    means.push_back(s / static_cast<double>(x.size()));
  }
  std::sort(means.begin(), means.end());
  auto q = [&](double p) {
    double h = p * static_cast<double>(means.size() - 1);
    size_t lo = static_cast<size_t>(h);
    size_t hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (h - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  double alpha = (1 - level) / 2;
  return {q(alpha), q(1 - alpha)};
}

}  // namespace oracle
