#pragma once

// Border aggregation on boxes of Z^d, plus two diagnostics used for the
// two-dimensional lower bound: first-hit distributions of finite sets and
// first-arrival indices on a system of rings.
//
// Vertices are flat indices into [-N..N]^d with x_1 varying fastest. The
// walk picks one of the 2d neighbours with a single uniform_below(2d), in
// the order +x1, -x1, +x2, -x2, ...

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bam/core.hpp"
#include "bam/error.hpp"
#include "bam/parallel.hpp"
#include "bam/rng.hpp"

namespace bam::lattice {

enum class Kind { box, disc, cube };

inline Kind parse_kind(std::string_view s) {
  if (s == "box") return Kind::box;
  if (s == "disc") return Kind::disc;
  if (s == "cube") return Kind::cube;
  throw config_error("unknown lattice kind '" + std::string(s) + "' (box|disc|cube)");
}

inline GraphModel build_lattice_model(Kind kind, int d, int N) {
  GraphModel m;
  switch (kind) {
    case Kind::box:
      require(d == 2, "box lattice needs d = 2");
      m = box2d_model(N);
      break;
    case Kind::disc:
      require(d == 2, "disc lattice needs d = 2");
      m = disc2d_model(N);
      break;
    case Kind::cube:
      require(d >= 3, "cube lattice needs d >= 3");
      m = cube_model(d, N);
      break;
  }
  validate(m);
  return m;
}

inline bool is_lattice(Family f) {
  return f == Family::box2d || f == Family::disc2d || f == Family::cube;
}

inline constexpr std::int64_t kMaxCells = 200'000'000;

class LatticeGraph {
 public:
  explicit LatticeGraph(const GraphModel& m) : model_(m) {
    validate(m);
    require(is_lattice(m.family), "LatticeGraph: not a lattice model");
    const std::int64_t side = 2 * std::int64_t{m.N} + 1;
    std::int64_t stride = 1;
    for (int i = 0; i < m.d; ++i) {
      stride_.push_back(stride);
      if (stride > kMaxCells / side)
        throw guard_error("lattice: (2N+1)^d exceeds " + std::to_string(kMaxCells) + " cells");
      stride *= side;
    }
    cells_ = stride;
  }

  Family family() const { return model_.family; }
  const GraphModel& model() const { return model_; }
  int dim() const { return model_.d; }
  int half_width() const { return model_.N; }
  std::int64_t cell_count() const { return cells_; }
  std::int64_t stride(int axis) const { return stride_[axis]; }

  std::int64_t id(const Coords& x) const {
    require(static_cast<int>(x.size()) == dim(), "lattice: wrong coordinate count");
    for (auto c : x) require(std::abs(c) <= model_.N, "lattice: coordinates out of range");
    std::int64_t v = 0;
    for (int i = 0; i < dim(); ++i) v += (x[i] + model_.N) * stride_[i];
    return v;
  }
  Coords coords(std::int64_t v) const {
    const std::int64_t side = 2 * std::int64_t{model_.N} + 1;
    Coords x(dim());
    for (int i = 0; i < dim(); ++i) {
      x[i] = v % side - model_.N;
      v /= side;
    }
    return x;
  }
  std::int64_t origin() const { return (cells_ - 1) / 2; }

  bool is_border_coords(const Coords& x) const {
    const std::int64_t N = model_.N;
    if (model_.family == Family::box2d) return std::abs(x[0]) == N || std::abs(x[1]) == N;
    std::int64_t r2 = 0;
    for (auto c : x) r2 += c * c;
    return r2 >= (N - 1) * (N - 1);
  }
  bool is_border(std::int64_t v) const { return is_border_coords(coords(v)); }

  // Calls f(w) for each in-box neighbour, in step order.
  template <class F>
  bool any_neighbor(std::int64_t v, F&& f) const {
    const Coords x = coords(v);
    for (int i = 0; i < dim(); ++i) {
      if (x[i] < model_.N && f(v + stride_[i])) return true;
      if (x[i] > -model_.N && f(v - stride_[i])) return true;
    }
    return false;
  }

  std::int64_t step(std::int64_t v, Engine& rng) const {
    const auto k = uniform_below(rng, 2 * static_cast<std::uint64_t>(dim()));
    const std::int64_t s = stride_[k / 2];
    return k % 2 == 0 ? v + s : v - s;
  }

 private:
  GraphModel model_;
  std::vector<std::int64_t> stride_;
  std::int64_t cells_ = 0;
};

struct Cardinalities {
  std::int64_t vertices = 0;         // |G|
  std::int64_t border = 0;           // |B|
  std::int64_t border_distance = 0;  // graph distance from the origin to B
};

inline Cardinalities cardinalities(const LatticeGraph& g) {
  Cardinalities c;
  c.vertices = g.cell_count();
  c.border_distance = std::int64_t{g.half_width()} * g.dim();
  for (std::int64_t v = 0; v < g.cell_count(); ++v) {
    const Coords x = g.coords(v);
    if (!g.is_border_coords(x)) continue;
    ++c.border;
    std::int64_t l1 = 0;
    for (auto xi : x) l1 += std::abs(xi);
    c.border_distance = std::min(c.border_distance, l1);
  }
  return c;
}

/// Dense-grid engine. Every cell carries a "sticky" bit and a "next to a
/// sticky cell" bit, so the stopping test is one load per step. Draws are
/// the same as run_literal on LatticeGraph and the outcomes are identical.
inline BAOutcome simulate_lattice(const LatticeGraph& g, Engine& rng,
                                  std::optional<std::int64_t> cap = {}) {
  constexpr std::uint8_t kSticky = 1, kNear = 2;
  const int d = g.dim();
  const std::int64_t N = g.half_width();
  std::vector<std::uint8_t> cell(static_cast<std::size_t>(g.cell_count()), 0);
  std::vector<std::int64_t> step(2 * d);
  for (int i = 0; i < d; ++i) {
    step[2 * i] = g.stride(i);
    step[2 * i + 1] = -g.stride(i);
  }

  // Odometer over coordinates so the border test needs no divisions.
  Coords x(d, -N);
  for (std::int64_t v = 0; v < g.cell_count(); ++v) {
    if (g.is_border_coords(x)) cell[v] = kSticky;
    for (int i = 0; i < d && ++x[i] > N; ++i) x[i] = -N;
  }
  auto mark_neighbours = [&](std::int64_t v) {
    g.any_neighbor(v, [&](std::int64_t w) {
      cell[w] |= kNear;
      return false;
    });
  };
  for (std::int64_t v = 0; v < g.cell_count(); ++v)
    if (cell[v] & kSticky) mark_neighbours(v);

  const auto two_d = 2 * static_cast<std::uint64_t>(d);
  BAOutcome out;
  out.family = g.family();
  for (std::int64_t n = 1;; ++n) {
    if (cap && n > *cap) throw guard_error("particle cap " + std::to_string(*cap) + " exceeded");
    std::int64_t v = g.origin();
    while (!(cell[v] & kNear)) v += step[uniform_below(rng, two_d)];
    if (v == g.origin()) {
      out.xi = n;
      return out;
    }
    cell[v] |= kSticky;
    mark_neighbours(v);
    out.stick_events.push_back({n, g.coords(v)});
  }
}

inline BAOutcome simulate_lattice(const GraphModel& m, Engine& rng,
                                  std::optional<std::int64_t> cap = {}) {
  return simulate_lattice(LatticeGraph(m), rng, cap);
}

/// Largest Euclidean norm over stuck vertices (the initial border excluded).
inline double cluster_radius(const BAOutcome& o) {
  double r2 = 0.0;
  for (const auto& e : o.stick_events) {
    double s = 0.0;
    for (auto c : e.at) s += static_cast<double>(c) * static_cast<double>(c);
    r2 = std::max(r2, s);
  }
  return std::sqrt(r2);
}

// ---------------------------------------------------------------------------
// Ring diagnostics.

/// Radii r_k = k^{3-delta}; ring k >= 1 is {r_{k-1} < |v| <= r_k} and ring 0
/// is the origin. The system is extended until it covers the [-N..N]^2 box.
struct RingSystem {
  double delta = 0.1;
  std::vector<double> radii;  // radii[k] = r_k, radii[0] = 0

  RingSystem(double delta_, int N) : delta(delta_) {
    require(delta > 0.0 && delta < 1.0, "rings: delta must be in (0, 1)");
    require(N >= 2, "rings: N must be >= 2");
    radii.push_back(0.0);
    for (int k = 1; radii.back() < N * std::numbers::sqrt2; ++k) radii.push_back(radius(k));
  }

  double radius(int k) const { return std::pow(static_cast<double>(k), 3.0 - delta); }
  double width_floor(int k) const { return std::pow(static_cast<double>(k), 2.0 - delta); }
  int count() const { return static_cast<int>(radii.size()); }  // rings 0..count()-1

  int ring_of(double norm) const {
    if (norm == 0.0) return 0;
    const auto it = std::lower_bound(radii.begin() + 1, radii.end(), norm);
    if (it == radii.end()) throw config_error("rings do not cover radius " + std::to_string(norm));
    return static_cast<int>(it - radii.begin());
  }

  // r_k - r_{k-1} >= k^{2-delta} for all k >= 2 (mean value theorem gives
  // (3 - delta) (k-1)^{2-delta}, which dominates for delta < 1).
  bool widths_ok() const {
    for (int k = 2; k < count(); ++k)
      if (radii[k] - radii[k - 1] < width_floor(k)) return false;
    return true;
  }
};

struct RingCrossing {
  int k = 0;
  std::int64_t nu = 0;    // index of the first particle stuck in ring k (0: initial border)
  std::int64_t zeta = 0;  // nu_k - nu_{k+1}
  double width = 0.0;     // r_k - r_{k-1}

  friend bool operator==(const RingCrossing&, const RingCrossing&) = default;
};

/// First-arrival index per ring for a disc2d run, innermost ring first.
/// Border vertices count as stuck at time 0 and the final particle fills
/// ring 0. Rings that never receive a particle are omitted; the cluster is
/// connected and each ring is at least one unit wide, so this only happens
/// for rings lying entirely outside the box.
inline std::vector<RingCrossing> ring_crossing_stats(const BAOutcome& o, const RingSystem& rings) {
  require(o.family == Family::disc2d, "ring_crossing_stats: needs a disc2d outcome");
  std::vector<std::int64_t> nu(rings.count(), -1);
  nu[0] = o.xi;
  for (const auto& e : o.stick_events) {
    const double norm = std::hypot(static_cast<double>(e.at[0]), static_cast<double>(e.at[1]));
    const int k = rings.ring_of(norm);
    if (nu[k] < 0) nu[k] = e.n;
  }
  // Outer rings reached only by the border.
  int last = rings.count() - 1;
  while (last > 0 && nu[last] < 0) --last;
  std::vector<RingCrossing> out;
  for (int k = 0; k <= last; ++k) {
    RingCrossing c;
    c.k = k;
    c.nu = nu[k] < 0 ? 0 : nu[k];
    c.width = k == 0 ? 0.0 : rings.radii[k] - rings.radii[k - 1];
    out.push_back(c);
  }
  for (int k = 0; k <= last; ++k) {
    const std::int64_t outer = k + 1 <= last ? out[k + 1].nu : 0;
    out[k].zeta = out[k].nu - outer;
  }
  return out;
}

// ---------------------------------------------------------------------------
// First-hit distribution of a finite set B subset Z^2.

using Point = std::pair<std::int64_t, std::int64_t>;

struct HittingEstimate {
  std::vector<Point> target;
  Point source{0, 0};
  std::vector<std::uint64_t> counts;  // counts[i]: walks whose first hit of B was target[i]
  std::uint64_t reps = 0;
  std::uint64_t restarts = 0;  // walks sent back to the source after leaving the enclosure

  double frequency(std::size_t i) const {
    return static_cast<double>(counts[i]) / static_cast<double>(reps);
  }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

enum class Shape { point, cross, segment };

inline Shape parse_shape(std::string_view s) {
  if (s == "point") return Shape::point;
  if (s == "cross") return Shape::cross;
  if (s == "segment") return Shape::segment;
  throw config_error("unknown shape '" + std::string(s) + "' (point|cross|segment)");
}

/// point: {0}; cross: {(+-1,0),(0,+-1)}; segment: {(i,0) : 0 <= i <= r}.
inline std::vector<Point> make_target(Shape s, int r) {
  switch (s) {
    case Shape::point: return {{0, 0}};
    case Shape::cross: return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    case Shape::segment: {
      require(r >= 1, "segment: r must be >= 1");
      std::vector<Point> b;
      for (int i = 0; i <= r; ++i) b.emplace_back(i, 0);
      return b;
    }
  }
  return {};
}

/// Source used for the segment experiment: (0, round(r^{3/2} ln r)).
inline Point segment_source(int r) {
  require(r >= 2, "segment source needs r >= 2");
  const double h = std::pow(r, 1.5) * std::log(static_cast<double>(r));
  return {0, static_cast<std::int64_t>(std::llround(h))};
}

namespace detail {

inline std::int64_t chebyshev(Point a, Point b) {
  return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
}

/// Exit law of simple random walk started at the centre of the square
/// {|dx|, |dy| <= L}. Corners are never hit. On the side dx = +L, the
/// offset dy = j - L, 1 <= j <= 2L - 1, has probability
///   sum_{k odd} (1/n) sin(pi k j / n) sin(pi k / 2) / cosh(beta_k L),
/// n = 2L, cosh beta_k = 2 - cos(pi k / n), from the sine-series solution
/// of the discrete Dirichlet problem. The other sides follow by symmetry.
class SquareExit {
 public:
  explicit SquareExit(std::int64_t L) : L_(L) {
    const std::int64_t n = 2 * L;
    std::vector<double> side(n - 1, 0.0);
    for (std::int64_t k = 1; k < n; k += 2) {
      const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      const double beta = std::acosh(2.0 - std::cos(theta));
      const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;  // sin(pi k / 2)
      const double amp = sign / (static_cast<double>(n) * std::cosh(beta * static_cast<double>(L)));
      for (std::int64_t j = 1; j < n; ++j) side[j - 1] += amp * std::sin(theta * static_cast<double>(j));
    }
    double acc = 0.0;
    cdf_.reserve(4 * side.size());
    for (int s = 0; s < 4; ++s)
      for (double p : side) cdf_.push_back(acc += p);
    for (double& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
  }

  std::int64_t half() const { return L_; }

  Point sample(Engine& rng) const {
    const double u = uniform01(rng);
    const auto i = static_cast<std::int64_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    const std::int64_t per_side = 2 * L_ - 1;
    const std::int64_t off = i % per_side + 1 - L_;
    switch (i / per_side) {
      case 0: return {L_, off};
      case 1: return {-L_, off};
      case 2: return {off, L_};
      default: return {off, -L_};
    }
  }

 private:
  std::int64_t L_;
  std::vector<double> cdf_;
};

inline const std::vector<SquareExit>& square_tables() {
  static const std::vector<SquareExit> tables = [] {
    std::vector<SquareExit> t;
    for (std::int64_t L = 1; L <= 1024; L *= 2) t.emplace_back(L);
    return t;
  }();
  return tables;
}

}  // namespace detail

enum class HitEngine { jump, literal };

struct HittingConfig {
  std::vector<Point> target;
  Point source{0, 0};
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::int64_t enclosure = 0;  // Chebyshev radius R; 0 selects 100 * |source|_inf (at least 100)
  HitEngine engine = HitEngine::jump;
  unsigned threads = default_threads();
};

/// Walks from the source until the first visit to the target. A walk that
/// reaches |p|_inf >= R is restarted at the source; restarts only discard
/// walks that left the enclosure and are counted for reporting.
///
/// The jump engine moves by exact exit draws from the largest power-of-two
/// square that stays clear of the target and inside the enclosure, which
/// gives the same path law observed at square exits; the literal engine
/// steps one edge at a time.
inline HittingEstimate estimate_hitting_measure(const HittingConfig& cfg) {
  require(cfg.reps > 0, "hitting measure: reps must be positive");
  require(!cfg.target.empty(), "hitting measure: empty target");
  for (const auto& b : cfg.target)
    require(b != cfg.source, "hitting measure: source lies in the target");
  const std::int64_t src_norm = std::max(std::abs(cfg.source.first), std::abs(cfg.source.second));
  const std::int64_t R = cfg.enclosure > 0 ? cfg.enclosure : std::max<std::int64_t>(100, 100 * src_norm);
  for (const auto& b : cfg.target)
    require(std::max(std::abs(b.first), std::abs(b.second)) < R && src_norm < R,
            "hitting measure: enclosure must contain source and target");

  auto key = [](Point p) { return (p.first << 32) ^ (p.second & 0xffffffff); };
  std::unordered_map<std::int64_t, std::size_t> where;
  for (std::size_t i = 0; i < cfg.target.size(); ++i) where.emplace(key(cfg.target[i]), i);
  const auto& tables = detail::square_tables();

  struct One {
    std::uint32_t hit = 0;
    std::uint32_t restarts = 0;
  };
  auto one = [&](std::uint64_t r) {
    Engine rng = make_stream(cfg.seed, r);
    One res;
    Point p = cfg.source;
    for (;;) {
      if (std::max(std::abs(p.first), std::abs(p.second)) >= R) {
        p = cfg.source;
        ++res.restarts;
      }
      if (cfg.engine == HitEngine::jump) {
        std::int64_t clear = R - std::max(std::abs(p.first), std::abs(p.second));
        for (const auto& b : cfg.target) clear = std::min(clear, detail::chebyshev(p, b) - 1);
        if (clear >= 2) {
          std::size_t t = 0;
          while (t + 1 < tables.size() && tables[t + 1].half() <= clear) ++t;
          const Point d = tables[t].sample(rng);
          p = {p.first + d.first, p.second + d.second};
          continue;
        }
      }
      switch (uniform_below(rng, 4)) {
        case 0: ++p.first; break;
        case 1: --p.first; break;
        case 2: ++p.second; break;
        default: --p.second; break;
      }
      if (auto it = where.find(key(p)); it != where.end()) {
        res.hit = static_cast<std::uint32_t>(it->second);
        return res;
      }
    }
  };
  const auto runs = run_replicas(cfg.reps, one, cfg.threads);

  HittingEstimate h;
  h.target = cfg.target;
  h.source = cfg.source;
  h.reps = cfg.reps;
  h.counts.assign(cfg.target.size(), 0);
  for (const auto& r : runs) {
    ++h.counts[r.hit];
    h.restarts += r.restarts;
  }
  return h;
}

}  // namespace bam::lattice
