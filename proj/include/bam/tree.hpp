#pragma once

// Border aggregation on the d-ary tree of depth K with border = level K.
// The walk only moves away from the root, choosing a child uniformly, so a
// particle is a uniform random path that stops at the first vertex with a
// sticky child.
//
// For d = 2 the law of xi_K is computed exactly from the coin-race recursion
//   xi_{K+1} = 1 + eta(xi'_K, xi''_K),
// where eta(a, b) counts fair coin tosses until a heads or b tails.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "bam/core.hpp"
#include "bam/error.hpp"
#include "bam/pmf.hpp"
#include "bam/rng.hpp"

namespace bam::tree {

inline BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt c = 1;
  for (std::int64_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// P(eta = l) = [C(l-1, l-b) + C(l-1, l-a)] / 2^l on [min(a,b), a+b-1].
inline Pmf eta_pmf(std::int64_t a, std::int64_t b) {
  require(a >= 1 && b >= 1, "eta_pmf: a and b must be positive");
  Pmf p;
  for (std::int64_t l = std::min(a, b); l <= a + b - 1; ++l) {
    BigInt num = binomial(l - 1, l - b) + binomial(l - 1, l - a);
    p.add(l, Rational(num, BigInt(1) << l));
  }
  return p;
}

inline constexpr int kExactMaxDepth = 12;

/// Exact law of xi_K on the binary tree.
///
/// Because xi' and xi'' are exchangeable the two halves of the eta kernel
/// contribute equally, and summing out b leaves a tail probability:
///   P(xi_{K+1} = 1 + l) = 2^{1-l} sum_a P(xi_K = a) C(l-1, l-a) P(xi_K >= l-a+1).
/// Every mass is dyadic, so the sweep runs on integer numerators over one
/// common power of two and reduces each fraction at the end.
inline Pmf xi_tree_exact(int K) {
  require(K >= 1, "xi_tree_exact: K must be >= 1");
  if (K > kExactMaxDepth)
    throw guard_error("xi_tree_exact: K > " + std::to_string(kExactMaxDepth) +
                      " (support and denominators grow like 2^K)");

  // xi_K = lo + i  has probability num[i] / 2^exp
  std::int64_t lo = 1;
  std::vector<BigInt> num{1};
  std::int64_t exp = 0;

  for (int depth = 1; depth < K; ++depth) {
    const auto n = static_cast<std::int64_t>(num.size());
    const std::int64_t hi = lo + n - 1;
    // tail[i] = numerator of P(xi >= lo + i)
    std::vector<BigInt> tail(n + 1);
    for (std::int64_t i = n; i-- > 0;) tail[i] = tail[i + 1] + num[i];
    auto tail_at = [&](std::int64_t m) -> const BigInt& {
      return tail[std::clamp(m, lo, hi + 1) - lo];  // tail[n] == 0
    };

    const std::int64_t l_min = lo, l_max = 2 * hi - 1;
    std::vector<BigInt> next(l_max - l_min + 1);
    std::vector<BigInt> row{1};  // row r of Pascal's triangle, r = l - 1
    for (std::int64_t r = 1; r < l_min; ++r) {
      row.push_back(0);
      for (std::int64_t j = r; j > 0; --j) row[j] += row[j - 1];
    }
    for (std::int64_t l = l_min; l <= l_max; ++l) {
      BigInt acc = 0;
      for (std::int64_t a = lo; a <= std::min(hi, l); ++a) {
        const BigInt& t = tail_at(l - a + 1);
        if (t == 0) continue;
        acc += num[a - lo] * row[l - a] * t;
      }
      next[l - l_min] = acc << (l_max - l);
      row.push_back(0);
      for (auto j = static_cast<std::int64_t>(row.size()) - 1; j > 0; --j) row[j] += row[j - 1];
    }
    exp = 2 * exp + l_max - 1;

    // Reduce the common power of two.
    std::int64_t shift = exp;
    for (const auto& x : next)
      if (x != 0) shift = std::min<std::int64_t>(shift, static_cast<std::int64_t>(lsb(x)));
    for (auto& x : next) x >>= shift;
    exp -= shift;

    // Trim zero masses at either end.
    std::size_t first = 0, last = next.size();
    while (first < last && next[first] == 0) ++first;
    while (last > first && next[last - 1] == 0) --last;
    num.assign(next.begin() + static_cast<std::ptrdiff_t>(first),
               next.begin() + static_cast<std::ptrdiff_t>(last));
    lo = 1 + l_min + static_cast<std::int64_t>(first);
  }

  Pmf p;
  const BigInt den = BigInt(1) << exp;
  for (std::size_t i = 0; i < num.size(); ++i)
    p.add(lo + static_cast<std::int64_t>(i), Rational(num[i], den));
  return p;
}

/// Floating-point version of the same recursion for depths beyond the exact
/// guard. Binomial weights are evaluated in log space; masses are
/// renormalized after each level and the drift is returned.
struct FloatPmf {
  std::map<std::int64_t, double> mass;
  double max_renormalization = 0.0;  // largest |1 - total| seen before rescaling
};

inline FloatPmf xi_tree_float(int K) {
  require(K >= 1 && K <= 16, "xi_tree_float: K must be in [1, 16]");
  std::int64_t lo = 1;
  std::vector<double> p{1.0};
  double drift = 0.0;
  for (int depth = 1; depth < K; ++depth) {
    const auto n = static_cast<std::int64_t>(p.size());
    const std::int64_t hi = lo + n - 1;
    std::vector<double> tail(n + 1, 0.0);
    for (std::int64_t i = n; i-- > 0;) tail[i] = tail[i + 1] + p[i];
    const std::int64_t l_min = lo, l_max = 2 * hi - 1;
    std::vector<double> next(l_max - l_min + 1, 0.0);
    for (std::int64_t l = l_min; l <= l_max; ++l) {
      double acc = 0.0;
      for (std::int64_t a = lo; a <= std::min(hi, l); ++a) {
        const std::int64_t m = l - a + 1;
        const double t = m <= lo ? tail[0] : (m > hi ? 0.0 : tail[m - lo]);
        if (t == 0.0 || p[a - lo] == 0.0) continue;
        const double log_w = std::lgamma(static_cast<double>(l)) -
                             std::lgamma(static_cast<double>(l - a + 1)) -
                             std::lgamma(static_cast<double>(a)) + (1 - l) * std::log(2.0);
        acc += p[a - lo] * t * std::exp(log_w);
      }
      next[l - l_min] = acc;
    }
    double total = 0.0;
    for (double x : next) total += x;
    drift = std::max(drift, std::abs(1.0 - total));
    for (double& x : next) x /= total;
    p = std::move(next);
    lo = 1 + l_min;
  }
  FloatPmf out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) out.mass.emplace(lo + static_cast<std::int64_t>(i), p[i]);
  out.max_renormalization = drift;
  return out;
}

/// Deterministic bound: level i < K holds at most d^{i-1} stuck particles,
/// plus the final particle at the root:
///   xi_K <= (d^{K-1} - 1)/(d - 1) + 1.
inline std::int64_t tree_upper_bound(int d, int K) {
  require(d >= 2 && K >= 2, "tree_upper_bound: need d >= 2, K >= 2");
  std::int64_t power = 1, sum = 0;  // sum = 1 + d + ... + d^{K-2}
  for (int i = 0; i <= K - 2; ++i) {
    sum += power;
    if (i < K - 2) {
      require(power <= std::numeric_limits<std::int64_t>::max() / d, "tree_upper_bound: overflow");
      power *= d;
    }
  }
  return sum + 1;
}

// ---------------------------------------------------------------------------
// Simulation.

/// Heap layout: the root is 0 and the children of v are d*v + 1, ..., d*v + d.
class TreeGraph {
 public:
  TreeGraph(int d, int K) : d_(d), K_(K) {
    validate(tree_model(d, K));
    std::int64_t first = 0, width = 1;
    for (int l = 0; l <= K; ++l) {
      require(width <= (std::int64_t{1} << 40) / d, "tree too large");
      first_.push_back(first);
      first += width;
      width *= d;
    }
    first_.push_back(first);
  }

  Family family() const { return Family::tree; }
  std::int64_t origin() const { return 0; }
  int arity() const { return d_; }
  int depth() const { return K_; }
  std::int64_t level_start(int l) const { return first_[l]; }
  std::int64_t internal_count() const { return first_[K_]; }
  std::int64_t vertex_count() const { return first_[K_ + 1]; }
  std::int64_t border_count() const { return first_[K_ + 1] - first_[K_]; }

  int level(std::int64_t v) const {
    return static_cast<int>(std::upper_bound(first_.begin(), first_.end(), v) - first_.begin()) - 1;
  }
  bool is_border(std::int64_t v) const { return v >= first_[K_]; }

  template <class F>
  bool any_neighbor(std::int64_t v, F&& f) const {
    if (v > 0 && f((v - 1) / d_)) return true;
    if (is_border(v)) return false;
    for (int c = 1; c <= d_; ++c)
      if (f(d_ * v + c)) return true;
    return false;
  }

  std::int64_t step(std::int64_t v, Engine& rng) const {
    return d_ * v + 1 + static_cast<std::int64_t>(uniform_below(rng, d_));
  }

  // (index of the vertex within its level, level)
  Coords coords(std::int64_t v) const {
    const int l = level(v);
    return {v - first_[l], l};
  }
  std::int64_t id(const Coords& c) const {
    require(c.size() == 2 && c[1] >= 0 && c[1] <= K_ && c[0] >= 0 &&
                c[0] < first_[c[1] + 1] - first_[c[1]],
            "tree: coordinates out of range");
    return first_[c[1]] + c[0];
  }

 private:
  int d_, K_;
  std::vector<std::int64_t> first_;
};

/// first_stick[i]: index of the first particle stuck at level i (0 if none);
/// level 0 holds xi, the particle that sticks at the root.
/// level_counts[i]: stick events at level i.
struct TreeRunExtras {
  std::vector<std::int64_t> first_stick;
  std::vector<std::int64_t> level_counts;

  friend bool operator==(const TreeRunExtras&, const TreeRunExtras&) = default;
};

struct TreeRun {
  BAOutcome outcome;
  TreeRunExtras extras;
};

/// Path sampling with a per-vertex "has a sticky child" flag. Consumes one
/// uniform_below(d) per level climbed, the same draws as run_literal on
/// TreeGraph, so both produce identical outcomes from the same stream.
inline TreeRun simulate_tree(const TreeGraph& g, Engine& rng) {
  const int d = g.arity(), K = g.depth();
  std::vector<std::uint8_t> sticky_child(static_cast<std::size_t>(g.internal_count()), 0);
  for (std::int64_t v = g.level_start(K - 1); v < g.internal_count(); ++v) sticky_child[v] = 1;

  TreeRun run;
  run.outcome.family = Family::tree;
  run.extras.first_stick.assign(K, 0);
  run.extras.level_counts.assign(K, 0);
  for (std::int64_t n = 1;; ++n) {
    std::int64_t v = 0;
    int level = 0;
    while (!sticky_child[v]) {
      v = d * v + 1 + static_cast<std::int64_t>(uniform_below(rng, d));
      ++level;
    }
    if (v == 0) {
      run.outcome.xi = n;
      run.extras.first_stick[0] = n;
      return run;
    }
    sticky_child[(v - 1) / d] = 1;
    run.outcome.stick_events.push_back({n, {v - g.level_start(level), level}});
    if (run.extras.first_stick[level] == 0) run.extras.first_stick[level] = n;
    ++run.extras.level_counts[level];
  }
}

inline TreeRun simulate_tree(int d, int K, Engine& rng) { return simulate_tree(TreeGraph(d, K), rng); }

// ---------------------------------------------------------------------------
// Generalized birthday problem.

/// P(zeta_{K,2} > t) = prod_{i=1}^{t-1} (1 - i/A), A = d^{K-2}.
inline double birthday_tail(std::int64_t A, std::int64_t t) {
  require(A >= 1 && t >= 1, "birthday_tail: need A >= 1, t >= 1");
  if (t > A + 1) return 0.0;
  double p = 1.0;
  for (std::int64_t i = 1; i < t; ++i) p *= 1.0 - static_cast<double>(i) / static_cast<double>(A);
  return p;
}

/// Number of uniform draws from A outcomes until some outcome has been seen
/// m times.
inline std::int64_t simulate_zeta_km(std::int64_t A, std::int64_t m, Engine& rng) {
  require(A >= 1 && m >= 1, "simulate_zeta_km: need A >= 1, m >= 1");
  if (A <= (1 << 22)) {
    std::vector<std::int64_t> seen(static_cast<std::size_t>(A), 0);
    for (std::int64_t n = 1;; ++n)
      if (++seen[uniform_below(rng, A)] >= m) return n;
  }
  std::unordered_map<std::uint64_t, std::int64_t> seen;
  for (std::int64_t n = 1;; ++n)
    if (++seen[uniform_below(rng, A)] >= m) return n;
}

}  // namespace bam::tree
