#pragma once

// Statistics shared by the experiments: integer sample accumulators, the
// normal law, distribution distances, a chi-square goodness-of-fit test and
// log-log scaling fits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include "bam/error.hpp"
#include "bam/pmf.hpp"

namespace bam {

// ---------------------------------------------------------------------------
// Normal law. erfc-based; glibc's erfc is within a few ulp, so the absolute
// error of normal_cdf is below 1e-15 everywhere.

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// 1 - Phi(x) without cancellation in the upper tail.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// ---------------------------------------------------------------------------

/// Accumulator for integer-valued samples.
///
/// Sums are kept in exact integer arithmetic, so merge() is associative and
/// commutative bit for bit and the result of a parallel reduction does not
/// depend on how replicas were split.
struct SampleStats {
  std::uint64_t count = 0;
  __int128 sum = 0;
  __int128 sum_sq = 0;
  std::int64_t min = std::numeric_limits<std::int64_t>::max();
  std::int64_t max = std::numeric_limits<std::int64_t>::min();
  std::map<std::int64_t, std::uint64_t> histogram;

  void add(std::int64_t x) {
    ++count;
    sum += x;
    sum_sq += static_cast<__int128>(x) * x;
    min = std::min(min, x);
    max = std::max(max, x);
    ++histogram[x];
  }

  SampleStats& merge(const SampleStats& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
    min = std::min(min, o.min);
    max = std::max(max, o.max);
    for (const auto& [k, c] : o.histogram) histogram[k] += c;
    return *this;
  }

  double mean() const {
    require(count > 0, "mean of empty sample");
    return static_cast<double>(sum) / static_cast<double>(count);
  }

  // Unbiased sample variance, computed from the exact sums.
  double variance() const {
    require(count > 1, "variance needs at least two samples");
    const __int128 n = count;
    const __int128 num = n * sum_sq - sum * sum;
    return static_cast<double>(num) / (static_cast<double>(n) * static_cast<double>(n - 1));
  }

  std::map<std::int64_t, double> empirical_pmf() const {
    std::map<std::int64_t, double> p;
    for (const auto& [k, c] : histogram) p.emplace(k, static_cast<double>(c) / count);
    return p;
  }

  friend bool operator==(const SampleStats&, const SampleStats&) = default;
};

inline SampleStats merge(SampleStats a, const SampleStats& b) { return a.merge(b); }

// ---------------------------------------------------------------------------
// Distances.

inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), "ks_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

inline double tv_distance(const std::map<std::int64_t, double>& p,
                          const std::map<std::int64_t, double>& q) {
  require(!p.empty() && !q.empty(), "tv_distance: empty distribution");
  double s = 0.0;
  for (const auto& [k, pk] : p) {
    auto it = q.find(k);
    s += std::abs(pk - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, qk] : q)
    if (!p.contains(k)) s += qk;
  return 0.5 * s;
}

inline Rational tv_distance(const Pmf& p, const Pmf& q) {
  require(!p.empty() && !q.empty(), "tv_distance: empty distribution");
  Rational s = 0;
  for (const auto& [k, pk] : p) s += abs(pk - q(k));
  for (const auto& [k, qk] : q)
    if (p(k) == 0) s += qk;
  return s / 2;
}

// ---------------------------------------------------------------------------

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness-of-fit of an integer histogram against exact
/// probabilities. Adjacent support points (in increasing order) are pooled
/// until each bin expects at least `min_expected` counts. An observation
/// outside the support of `expected` gives p = 0.
inline ChiSquare chi_square_gof(const std::map<std::int64_t, std::uint64_t>& observed,
                                const std::map<std::int64_t, double>& expected,
                                double min_expected = 5.0) {
  std::uint64_t n = 0;
  for (const auto& kv : observed) n += kv.second;
  require(n > 0 && !expected.empty(), "chi_square_gof: empty input");
  for (const auto& kv : observed)
    if (!expected.contains(kv.first)) return {std::numeric_limits<double>::infinity(), 0, 0.0};

  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double obs = 0.0, exp = 0.0;
  for (const auto& [k, p] : expected) {
    auto it = observed.find(k);
    obs += it == observed.end() ? 0.0 : static_cast<double>(it->second);
    exp += p * static_cast<double>(n);
    if (exp >= min_expected) {
      bins.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0 || obs > 0.0) {
    if (bins.empty()) {
      bins.emplace_back(obs, exp);
    } else {
      bins.back().first += obs;
      bins.back().second += exp;
    }
  }

  ChiSquare r;
  for (const auto& [o, e] : bins) r.statistic += (o - e) * (o - e) / e;
  r.dof = static_cast<int>(bins.size()) - 1;
  if (r.dof < 1) return {r.statistic, 0, 1.0};
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

// ---------------------------------------------------------------------------

/// Least-squares fit of log(mean) = intercept + alpha * log(N).
struct ScalingFit {
  double alpha = 0.0;
  double intercept = 0.0;  // natural log of the prefactor
  double rss = 0.0;
  std::size_t n = 0;
};

inline ScalingFit fit_scaling(std::span<const std::pair<double, double>> points) {
  require(points.size() >= 3, "fit_scaling: need at least three points");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    require(x > 0 && y > 0 && std::isfinite(x) && std::isfinite(y),
            "fit_scaling: data must be positive and finite");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  require(sxx > 0, "fit_scaling: all N identical");
  ScalingFit f;
  f.alpha = sxy / sxx;
  f.intercept = my - f.alpha * mx;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - (f.intercept + f.alpha * std::log(x));
    f.rss += r * r;
  }
  f.n = points.size();
  return f;
}

inline void to_json(nlohmann::json& j, const ScalingFit& f) {
  j = nlohmann::json{{"alpha", f.alpha}, {"intercept", f.intercept}, {"rss", f.rss}, {"n", f.n}};
}

}  // namespace bam
