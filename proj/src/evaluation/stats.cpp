#include <algorithm>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "common/error.hpp"
#include "common/random.hpp"
#include "evaluation/evaluation.hpp"

namespace chronokg {

using nlohmann::ordered_json;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) fail(ErrorKind::kDomain, "quantile of empty data");
  double h = q * static_cast<double>(sorted.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(h));
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_ci(const std::vector<double>& outcomes, size_t resamples, uint64_t seed, double level) {
  if (outcomes.empty()) fail(ErrorKind::kDomain, "bootstrap needs at least one outcome");
  if (resamples == 0 || level <= 0 || level >= 1) fail(ErrorKind::kDomain, "bad bootstrap parameters");
  Rng rng(seed);
  const size_t n = outcomes.size();
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0;
    for (size_t i = 0; i < n; ++i) s += outcomes[rng.index(n)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  double alpha = (1 - level) / 2;
  return {quantile_sorted(means, alpha), quantile_sorted(means, 1 - alpha)};
}

Interval bootstrap_ci(const std::vector<bool>& outcomes, size_t resamples, uint64_t seed, double level) {
  std::vector<double> v(outcomes.begin(), outcomes.end());
  return bootstrap_ci(v, resamples, seed, level);
}

double mcnemar_exact(size_t b, size_t c) {
  const size_t n = b + c;
  if (n == 0) return 1.0;
  // The smaller discordant count always carries the smaller tail.
  boost::math::binomial_distribution<double> dist(static_cast<double>(n), 0.5);
  double tail = boost::math::cdf(dist, static_cast<double>(std::min(b, c)));
  return std::min(1.0, 2 * tail);
}

double mcnemar_exact(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) fail(ErrorKind::kDomain, "mcnemar needs paired outcomes of equal length");
  size_t only_a = 0, only_b = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) ++only_a;
    if (!a[i] && b[i]) ++only_b;
  }
  return mcnemar_exact(only_a, only_b);
}

TTest paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail(ErrorKind::kDomain, "paired t needs equal-length samples");
  const size_t n = a.size();
  if (n < 2) fail(ErrorKind::kDomain, "paired t needs at least two pairs");
  std::vector<double> d(n);
  double mean = 0;
  for (size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    mean += d[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0;
  for (double x : d) ss += (x - mean) * (x - mean);
  TTest r;
  r.df = static_cast<double>(n - 1);
  double sd = std::sqrt(ss / r.df);
  if (sd == 0) {
    bool any = std::any_of(d.begin(), d.end(), [](double x) { return x != 0; });
    r.t = any ? (mean > 0 ? INFINITY : -INFINITY) : 0;
    r.p = any ? 0.0 : 1.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(r.df);
  r.p = std::min(1.0, 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  return r;
}

EvidenceAgeStats evidence_age_stats(const std::vector<TemporalTriple>& triples, int reference_year) {
  EvidenceAgeStats s;
  s.total = triples.size();
  std::vector<double> years;
  size_t recent = 0, old = 0;
  for (const auto& t : triples) {
    if (!t.evidence.publication_year) continue;
    int y = *t.evidence.publication_year;
    years.push_back(y);
    ++s.histogram[y];
    if (reference_year - y <= 5) ++recent;
    if (reference_year - y > 20) ++old;
  }
  s.dated = years.size();
  s.coverage = s.total ? static_cast<double>(s.dated) / static_cast<double>(s.total) : 0.0;
  if (years.empty()) return s;
  s.median_year = median(years);
  s.fraction_recent = static_cast<double>(recent) / static_cast<double>(s.dated);
  s.fraction_old = static_cast<double>(old) / static_cast<double>(s.dated);
  return s;
}

ordered_json to_json(const EvidenceAgeStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j = ordered_json::object();
  j["total"] = s.total;
  j["dated"] = s.dated;
  j["coverage"] = s.coverage;
  j["median_year"] = opt(s.median_year);
  j["fraction_within_5y"] = opt(s.fraction_recent);
  j["fraction_older_than_20y"] = opt(s.fraction_old);
  ordered_json h = ordered_json::object();
  for (const auto& [y, n] : s.histogram) h[std::to_string(y)] = n;
  j["histogram"] = h;
  return j;
}

}  // namespace chronokg
