#pragma once

// Border aggregation on the star graph: K segments {0, ..., N+1} glued at the
// origin, border = the K far ends.
//
// Three engines produce the same law for the survivors S_N(K):
//   walk   the literal simple random walk on the graph
//   urn    arm k loses one unit with probability proportional to 1/X_k
//   death  K independent pure death processes from level N, level k held for
//          an exponential time of mean k; the first to hit 0 is the
//          eliminated arm, the others' levels at that moment are the survivors
//
// The remaining part of the header evaluates the Gaussian limit objects for
// the standardized death time and for the rescaled survivor vector.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bam/analysis.hpp"
#include "bam/core.hpp"
#include "bam/error.hpp"
#include "bam/pmf.hpp"
#include "bam/rng.hpp"

namespace bam::star {

/// Vertex ids: 0 is the origin, arm a at depth t (1 <= t <= N+1) is
/// 1 + a*(N+1) + (t-1).
class StarGraph {
 public:
  StarGraph(int N, int K) : N_(N), K_(K) { validate(star_model(N, K)); }

  Family family() const { return Family::star; }
  std::int64_t origin() const { return 0; }
  int arm(std::int64_t v) const { return static_cast<int>((v - 1) / (N_ + 1)); }
  int depth(std::int64_t v) const { return v == 0 ? 0 : static_cast<int>((v - 1) % (N_ + 1)) + 1; }
  std::int64_t vertex(int arm, int depth) const {
    return depth == 0 ? 0 : 1 + static_cast<std::int64_t>(arm) * (N_ + 1) + (depth - 1);
  }
  bool is_border(std::int64_t v) const { return depth(v) == N_ + 1; }

  template <class F>
  bool any_neighbor(std::int64_t v, F&& f) const {
    if (v == 0) {
      for (int a = 0; a < K_; ++a)
        if (f(vertex(a, 1))) return true;
      return false;
    }
    const int a = arm(v), t = depth(v);
    if (f(vertex(a, t - 1))) return true;
    return t <= N_ && f(vertex(a, t + 1));
  }

  // At the origin: uniform arm. Elsewhere: 0 -> inward, 1 -> outward.
  std::int64_t step(std::int64_t v, Engine& rng) const {
    if (v == 0) return vertex(static_cast<int>(uniform_below(rng, K_)), 1);
    return uniform_below(rng, 2) == 0 ? vertex(arm(v), depth(v) - 1) : v + 1;
  }

  Coords coords(std::int64_t v) const { return {arm(v), depth(v)}; }
  std::int64_t id(const Coords& c) const {
    require(c.size() == 2 && c[0] >= 0 && c[0] < K_ && c[1] >= 0 && c[1] <= N_ + 1,
            "star: coordinates out of range");
    return vertex(static_cast<int>(c[0]), static_cast<int>(c[1]));
  }

  // Closed forms for the dist(v0, B) <= xi <= |G| - |B| check.
  std::int64_t vertex_count() const { return static_cast<std::int64_t>(K_) * (N_ + 1) + 1; }
  std::int64_t border_count() const { return K_; }
  std::int64_t border_distance() const { return N_ + 1; }

 private:
  int N_, K_;
};

struct StarRunResult {
  std::int64_t xi = 0;
  std::int64_t survivors = 0;       // S_N(K)
  int istar = 0;                    // eliminated arm
  std::vector<std::int64_t> remaining;  // per-arm remaining length; remaining[istar] == 0
  std::optional<double> tau_bar;    // death engine only

  friend bool operator==(const StarRunResult&, const StarRunResult&) = default;
};

enum class StarEngine { walk, urn, death };

inline StarEngine parse_engine(std::string_view s) {
  if (s == "walk") return StarEngine::walk;
  if (s == "urn") return StarEngine::urn;
  if (s == "death") return StarEngine::death;
  throw config_error("unknown star engine '" + std::string(s) + "'");
}

namespace detail {
inline StarRunResult finish(int N, int K, std::vector<std::int64_t> remaining, int istar) {
  StarRunResult r;
  r.istar = istar;
  for (auto x : remaining) r.survivors += x;
  r.xi = static_cast<std::int64_t>(N) * K - r.survivors + 1;
  r.remaining = std::move(remaining);
  return r;
}
}  // namespace detail

/// p_k proportional to 1/X_k.
inline std::vector<double> urn_step_probs(std::span<const std::int64_t> X) {
  require(!X.empty(), "urn_step_probs: empty state");
  double total = 0.0;
  for (auto x : X) {
    require(x >= 1, "urn_step_probs: process already stopped (some X_i = 0)");
    total += 1.0 / static_cast<double>(x);
  }
  std::vector<double> p;
  p.reserve(X.size());
  for (auto x : X) p.push_back(1.0 / static_cast<double>(x) / total);
  return p;
}

/// One draw per decrement: u = uniform01, the arm is the first k whose
/// cumulative weight sum_{i<=k} 1/X_i exceeds u * sum_i 1/X_i.
inline StarRunResult simulate_urn(int N, int K, Engine& rng) {
  validate(star_model(N, K));
  std::vector<std::int64_t> X(K, N);
  std::vector<double> inv(K, 1.0 / N);
  for (;;) {
    double total = 0.0;
    for (double w : inv) total += w;
    const double target = uniform01(rng) * total;
    int k = 0;
    for (double acc = inv[0]; acc <= target && k + 1 < K; acc += inv[++k]) {
    }
    if (--X[k] == 0) return detail::finish(N, K, std::move(X), k);
    inv[k] = 1.0 / static_cast<double>(X[k]);
  }
}

/// Rubin's construction. Draw order: arm 0 first, levels N, N-1, ..., 1 with
/// holding time exponential of mean equal to the level, then arm 1, and so
/// on. Ties in the death times (probability zero) go to the lowest index.
inline StarRunResult simulate_death_coupling(int N, int K, Engine& rng) {
  validate(star_model(N, K));
  // cum[i*N + m - 1] = time of the m-th death of arm i
  std::vector<double> cum(static_cast<std::size_t>(K) * N);
  for (int i = 0; i < K; ++i) {
    double t = 0.0;
    for (int level = N; level >= 1; --level) {
      t += exponential(rng, level);
      cum[static_cast<std::size_t>(i) * N + (N - level)] = t;
    }
  }
  int istar = 0;
  for (int i = 1; i < K; ++i)
    if (cum[static_cast<std::size_t>(i) * N + N - 1] < cum[static_cast<std::size_t>(istar) * N + N - 1])
      istar = i;
  const double tau_bar = cum[static_cast<std::size_t>(istar) * N + N - 1];

  std::vector<std::int64_t> remaining(K, 0);
  for (int i = 0; i < K; ++i) {
    if (i == istar) continue;
    auto first = cum.begin() + static_cast<std::ptrdiff_t>(i) * N;
    const auto deaths = std::upper_bound(first, first + N, tau_bar) - first;
    remaining[i] = N - deaths;
  }
  auto r = detail::finish(N, K, std::move(remaining), istar);
  r.tau_bar = tau_bar;
  return r;
}

/// Reads the urn state off a literal-walk outcome: arm a has lost one unit
/// per stick event on it.
inline StarRunResult result_from_outcome(const BAOutcome& o, int N, int K) {
  require(o.family == Family::star, "result_from_outcome: not a star outcome");
  std::vector<std::int64_t> remaining(K, N);
  for (const auto& e : o.stick_events) --remaining.at(static_cast<std::size_t>(e.at.at(0)));
  const auto it = std::find(remaining.begin(), remaining.end(), 0);
  require(it != remaining.end(), "result_from_outcome: no arm was filled");
  const auto istar = static_cast<int>(it - remaining.begin());
  auto r = detail::finish(N, K, std::move(remaining), istar);
  require(r.xi == o.xi, "result_from_outcome: inconsistent xi");
  return r;
}

inline StarRunResult simulate_walk(int N, int K, Engine& rng) {
  return result_from_outcome(run_literal(StarGraph(N, K), rng), N, K);
}

inline StarRunResult simulate(StarEngine e, int N, int K, Engine& rng) {
  switch (e) {
    case StarEngine::walk: return simulate_walk(N, K, rng);
    case StarEngine::urn: return simulate_urn(N, K, rng);
    case StarEngine::death: return simulate_death_coupling(N, K, rng);
  }
  return {};
}

/// Extinction time tau of one death process started at N: the sum of
/// independent exponentials of means N, N-1, ..., 1, drawn in that order.
inline double sample_tau(int N, Engine& rng) {
  require(N >= 1, "sample_tau: N must be >= 1");
  double t = 0.0;
  for (int k = N; k >= 1; --k) t += exponential(rng, k);
  return t;
}

/// Time for one death process started at N to reach level floor(a N^{3/4}).
inline double stopped_death_time(int N, double a, Engine& rng) {
  require(N >= 1 && a >= 0.0, "stopped_death_time: need N >= 1, a >= 0");
  const auto level = static_cast<int>(std::floor(a * std::pow(N, 0.75)));
  double t = 0.0;
  for (int k = N; k > level; --k) t += exponential(rng, k);
  return t;
}

/// Exact law of S_N(K) by dynamic programming over urn states, in rational
/// arithmetic. Refuses state spaces larger than 10^7.
inline Pmf exact_star_pmf(int N, int K) {
  validate(star_model(N, K));
  double states = std::pow(N + 1.0, K);
  if (states > 1e7) throw guard_error("exact_star_pmf: (N+1)^K exceeds 10^7");
  const auto n_states = static_cast<std::size_t>(states);

  // Mixed radix: index = sum_i X_i (N+1)^i. Every transition lowers the
  // index, so a descending sweep visits states after all their parents.
  std::vector<std::size_t> radix(K, 1);
  for (int i = 1; i < K; ++i) radix[i] = radix[i - 1] * (N + 1);
  std::vector<Rational> prob(n_states);
  prob[n_states - 1] = 1;

  Pmf out;
  std::vector<std::int64_t> X(K);
  for (std::size_t idx = n_states; idx-- > 0;) {
    if (prob[idx] == 0) continue;
    std::size_t rest = idx;
    bool stopped = false;
    std::int64_t sum = 0;
    for (int i = 0; i < K; ++i) {
      X[i] = static_cast<std::int64_t>(rest % (N + 1));
      rest /= (N + 1);
      stopped = stopped || X[i] == 0;
      sum += X[i];
    }
    if (stopped) {
      out.add(sum, prob[idx]);
      continue;
    }
    Rational total = 0;
    for (int i = 0; i < K; ++i) total += Rational(1, X[i]);
    for (int i = 0; i < K; ++i) prob[idx - radix[i]] += prob[idx] * Rational(1, X[i]) / total;
    prob[idx] = 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Death time of one arm.

struct TauMoments {
  double mean = 0.0;
  double variance = 0.0;
};

inline TauMoments tau_moments(int N) {
  require(N >= 1, "tau_moments: N must be >= 1");
  const double n = N;
  return {n * (n + 1) / 2, n * (n + 1) * (2 * n + 1) / 6};
}

/// (tau - N(N+1)/2) / (N^{3/2}/sqrt 3)
inline double standardize_tau(double tau, int N) {
  const double n = N;
  return (tau - n * (n + 1) / 2) / (std::pow(n, 1.5) / std::numbers::sqrt3);
}

inline double tau_centering(int N) {
  const double n = N;
  return (n + 1) * std::numbers::sqrt3 / (2 * std::sqrt(n));
}

// E|X - 1|^3 for X exponential of mean 1.
inline constexpr double kExpAbsThirdMoment = 12.0 / std::numbers::e - 2.0;

/// 2.75 * l_{3,N}, where l_{3,N} is the Lyapunov ratio of the centred
/// holding times: level j has variance j^2 and third absolute moment
/// j^3 (12/e - 2).
inline double berry_esseen_bound(int N) {
  require(N >= 1, "berry_esseen_bound: N must be >= 1");
  double s2 = 0.0, s3 = 0.0;
  for (int j = 1; j <= N; ++j) {
    const double x = j;
    s2 += x * x;
    s3 += x * x * x;
  }
  const double n = N;
  const double l3 = (kExpAbsThirdMoment * s3 / n) / std::pow(s2 / n, 1.5) / std::sqrt(n);
  return 2.75 * l3;
}

/// |phi_N(t)|^2 = prod_{k=1}^N 1 / (1 + 3 k^2 t^2 / N^3)
inline double phi_abs_squared(int N, double t) {
  require(N >= 1, "phi_abs_squared: N must be >= 1");
  const double n3 = std::pow(static_cast<double>(N), 3);
  double log_p = 0.0;
  for (int k = 1; k <= N; ++k) log_p -= std::log1p(3.0 * k * k * t * t / n3);
  return std::exp(log_p);
}

// ---------------------------------------------------------------------------
// Limit law of the rescaled survivors zeta = (remaining of arms != i*) / N^{3/4}.

/// Fixed-node composite Simpson rule over w in [lo, hi] against the standard
/// normal weight. The defaults (4097 nodes on [-12, 12]) give absolute errors
/// near 1e-12 for the integrands below.
struct LimitLawSpec {
  int K = 2;
  double lo = -12.0;
  double hi = 12.0;
  int nodes = 4097;
};

inline void validate(const LimitLawSpec& s) {
  require(s.K >= 2, "limit law: K must be >= 2");
  require(s.lo <= -12.0 && s.hi >= 12.0, "limit law: range must cover [-12, 12]");
  require(s.nodes >= 1024, "limit law: need at least 1024 nodes");
}

namespace detail {
template <class F>
double simpson(double lo, double hi, int nodes, F&& f) {
  if (nodes % 2 == 0) ++nodes;
  const double h = (hi - lo) / (nodes - 1);
  double s = f(lo) + f(hi);
  for (int i = 1; i < nodes - 1; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

inline void check_point(std::span<const double> a, int K) {
  require(static_cast<int>(a.size()) == K - 1, "limit law: point must have K-1 coordinates");
  for (double x : a) require(std::isfinite(x), "limit law: non-finite input");
}
}  // namespace detail

/// G(a) = P(zeta_1 > a_1, ..., zeta_{K-1} > a_{K-1})
///      = K / sqrt(2 pi) * int prod_i [1 - Phi(sqrt3/2 a_i^2 + w)] e^{-w^2/2} dw
inline double limit_cdf_G(std::span<const double> a, const LimitLawSpec& spec) {
  validate(spec);
  detail::check_point(a, spec.K);
  std::vector<double> shift;
  for (double x : a) shift.push_back(std::numbers::sqrt3 / 2 * x * x);
  const double v = detail::simpson(spec.lo, spec.hi, spec.nodes, [&](double w) {
    double p = normal_pdf(w);
    for (double c : shift) p *= normal_sf(c + w);
    return p;
  });
  return spec.K * v;
}

inline double limit_cdf_G(std::span<const double> a, int K) {
  return limit_cdf_G(a, LimitLawSpec{.K = K});
}

/// Joint density of zeta on the positive orthant:
///   a_1...a_{K-1} sqrt(K (3/2pi)^{K-1})
///     * exp(-3/8 [sum a_i^4 - (sum a_i^2)^2 / K])
inline double limit_density_f_zeta(std::span<const double> a, int K) {
  detail::check_point(a, K);
  double prod = 1.0, s2 = 0.0, s4 = 0.0;
  for (double x : a) {
    if (x < 0.0) return 0.0;
    prod *= x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  const double c = std::sqrt(K * std::pow(3.0 / (2.0 * std::numbers::pi), K - 1));
  return prod * c * std::exp(-0.375 * (s4 - s2 * s2 / K));
}

/// Density of b = sqrt3/2 zeta^2:
///   sqrt(K / (2pi)^{K-1}) exp(-1/2 [sum b_i^2 - (sum b_i)^2 / K])
inline double limit_density_f_b(std::span<const double> b, int K) {
  detail::check_point(b, K);
  double s1 = 0.0, s2 = 0.0;
  for (double x : b) {
    if (x < 0.0) return 0.0;
    s1 += x;
    s2 += x * x;
  }
  return std::sqrt(K / std::pow(2.0 * std::numbers::pi, K - 1)) * std::exp(-0.5 * (s2 - s1 * s1 / K));
}

/// Limit CDF of Y_i(tau_bar) / N^{3/4} for one fixed arm i: an atom 1/K at 0
/// (the arm is the eliminated one) plus a continuous part,
///   F(x) = 1 - (K-1)/sqrt(2pi) int [1 - Phi(sqrt3/2 x^2 + w)] [1 - Phi(w)]^{K-2} e^{-w^2/2} dw.
inline double limit_marginal_cdf(double x, const LimitLawSpec& spec) {
  validate(spec);
  require(std::isfinite(x), "limit law: non-finite input");
  if (x < 0.0) return 0.0;
  if (x == 0.0) return 1.0 / spec.K;
  const double c = std::numbers::sqrt3 / 2 * x * x;
  const double v = detail::simpson(spec.lo, spec.hi, spec.nodes, [&](double w) {
    return normal_sf(c + w) * std::pow(normal_sf(w), spec.K - 2) * normal_pdf(w);
  });
  return 1.0 - (spec.K - 1) * v;
}

/// Z_i = W_i - sum_j W_j / (sqrt K - 1), i < K, with W iid standard normal.
/// Cov(Z_i, Z_j) = 1 + [i == j].
inline std::vector<double> gaussian_rep(int K, Engine& rng) {
  require(K >= 2, "gaussian_rep: K must be >= 2");
  std::vector<double> w(K - 1);
  double s = 0.0;
  for (double& x : w) s += (x = standard_normal(rng));
  const double c = s / (std::sqrt(static_cast<double>(K)) - 1.0);
  for (double& x : w) x -= c;
  return w;
}

/// Rejection sampler for the limit law of b = sqrt3/2 zeta^2: draws Z until
/// every coordinate is nonnegative. Acceptance probability is 1/K.
inline std::vector<double> sample_conditioned_gaussian_rep(int K, Engine& rng,
                                                           std::uint64_t budget = 1'000'000) {
  for (std::uint64_t i = 0; i < budget; ++i) {
    auto z = gaussian_rep(K, rng);
    if (std::all_of(z.begin(), z.end(), [](double x) { return x >= 0.0; })) return z;
  }
  throw guard_error("sample_conditioned_gaussian_rep: rejection budget exhausted");
}

inline double b_to_a(double b) { return std::sqrt(2.0 * b / std::numbers::sqrt3); }

/// The rescaled survivor vector zeta^{(N)}: remaining lengths of the arms
/// other than istar, in arm order, divided by N^{3/4}.
inline std::vector<double> survivor_vector(const StarRunResult& r, int N) {
  const double scale = std::pow(static_cast<double>(N), 0.75);
  std::vector<double> z;
  for (std::size_t i = 0; i < r.remaining.size(); ++i)
    if (static_cast<int>(i) != r.istar) z.push_back(static_cast<double>(r.remaining[i]) / scale);
  return z;
}

}  // namespace bam::star
