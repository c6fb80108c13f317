#pragma once

// Border aggregation on the comb: Z^2 keeping only the vertical edges and the
// horizontal edges of the x-axis, with border |y| = N.
//
// Off the axis a particle only moves up or down, so the excursion into a
// tooth is a gambler's ruin. Frontiers only change at stick events, so they
// are frozen during one particle's flight and the walk can be replayed on the
// axis alone. For column j write H = h - 1 for the distance from (j, +-1) to
// the last free vertex of each half-column (a particle stops one edge short
// of the sticky vertex at distance h). From (j, 0) the walk steps
//   left / right           1/4 each
//   up, then stops at H+   1/(4 H+)    (ruin from height 1 towards H+)
//   down, then stops at H- 1/(4 H-)
// and otherwise comes back to (j, 0). Conditioning on leaving (j, 0) for good
// gives the kill probability q_kill(H+, H-) and, given death, the upper half
// with probability (1/H+) / (1/H+ + 1/H-).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bam/core.hpp"
#include "bam/error.hpp"
#include "bam/rng.hpp"

namespace bam::comb {

/// q = (h+ + h-) / (2 h+ h- + h+ + h-).
inline double q_kill(std::int64_t h_plus, std::int64_t h_minus) {
  require(h_plus >= 1 && h_minus >= 1, "q_kill: heights must be positive");
  const auto a = static_cast<double>(h_plus), b = static_cast<double>(h_minus);
  return (a + b) / (2.0 * a * b + a + b);
}

/// Death column law of simple random walk on Z started at 0 and killed at
/// each visit with probability gamma:
///   p_j = sqrt(gamma / (2 - gamma)) * lambda^|j|,
///   lambda = (1 - sqrt(gamma (2 - gamma))) / (1 - gamma).
inline double p_j_gamma(std::int64_t j, double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "p_j_gamma: gamma must be in (0, 1]");
  if (gamma == 1.0) return j == 0 ? 1.0 : 0.0;
  const double lambda = (1.0 - std::sqrt(gamma * (2.0 - gamma))) / (1.0 - gamma);
  return std::sqrt(gamma / (2.0 - gamma)) * std::pow(lambda, static_cast<double>(std::abs(j)));
}

/// One draw of the death column: each step dies with probability gamma
/// (one uniform01), else moves by a fair coin.
inline std::int64_t simulate_killed_walk(double gamma, Engine& rng) {
  require(gamma > 0.0 && gamma <= 1.0, "killed walk: gamma must be in (0, 1]");
  std::int64_t j = 0;
  while (uniform01(rng) >= gamma) j += fair_coin(rng) ? 1 : -1;
  return j;
}

// ---------------------------------------------------------------------------

/// Column frontiers. h_plus[j] is the distance from (j, 0) to the nearest
/// sticky vertex above it (N while only the border is there); likewise
/// h_minus below. Columns whose axis vertex has stuck are listed in
/// axis_sticky; their h values are left as they were.
class CombState {
 public:
  explicit CombState(int N) : N_(N) { require(N >= 2, "comb: N must be >= 2"); }

  int N() const { return N_; }
  std::int64_t lo() const { return -offset_; }
  std::int64_t hi() const { return static_cast<std::int64_t>(plus_.size()) - offset_ - 1; }

  std::int64_t h_plus(std::int64_t j) const { return in(j) ? plus_[at(j)] : N_; }
  std::int64_t h_minus(std::int64_t j) const { return in(j) ? minus_[at(j)] : N_; }
  bool axis_sticky(std::int64_t j) const { return in(j) && axis_[at(j)]; }

  void set_h_plus(std::int64_t j, std::int64_t h) { grow(j), plus_[at(j)] = h; }
  void set_h_minus(std::int64_t j, std::int64_t h) { grow(j), minus_[at(j)] = h; }
  void set_axis_sticky(std::int64_t j) { grow(j), axis_[at(j)] = 1; }

  // Applies one stick event at (j, y).
  void apply(std::int64_t j, std::int64_t y) {
    if (y == 0) {
      set_axis_sticky(j);
    } else if (y > 0) {
      set_h_plus(j, std::min(h_plus(j), y));
    } else {
      set_h_minus(j, std::min(h_minus(j), -y));
    }
  }

  /// CSV `j,h_plus,h_minus` over the columns that differ from the initial
  /// state, in increasing j.
  void write_frontier_csv(std::ostream& os) const {
    os << "j,h_plus,h_minus\n";
    for (std::int64_t j = lo(); j <= hi(); ++j)
      if (h_plus(j) != N_ || h_minus(j) != N_ || axis_sticky(j))
        os << j << ',' << h_plus(j) << ',' << h_minus(j) << '\n';
  }

  friend bool operator==(const CombState& a, const CombState& b) {
    if (a.N_ != b.N_) return false;
    const std::int64_t l = std::min(a.lo(), b.lo()), h = std::max(a.hi(), b.hi());
    for (std::int64_t j = l; j <= h; ++j)
      if (a.h_plus(j) != b.h_plus(j) || a.h_minus(j) != b.h_minus(j) ||
          a.axis_sticky(j) != b.axis_sticky(j))
        return false;
    return true;
  }

 private:
  bool in(std::int64_t j) const { return j >= lo() && j <= hi(); }
  std::size_t at(std::int64_t j) const { return static_cast<std::size_t>(j + offset_); }

  void grow(std::int64_t j) {
    if (plus_.empty()) {
      offset_ = -j;
      plus_.assign(1, N_), minus_.assign(1, N_), axis_.assign(1, 0);
      return;
    }
    if (j < lo()) {
      const auto extra = static_cast<std::size_t>(std::max(lo() - j, hi() - lo() + 1));
      plus_.insert(plus_.begin(), extra, N_);
      minus_.insert(minus_.begin(), extra, N_);
      axis_.insert(axis_.begin(), extra, 0);
      offset_ += static_cast<std::int64_t>(extra);
    } else if (j > hi()) {
      const auto size = static_cast<std::size_t>(std::max(j - lo() + 1, 2 * (hi() - lo() + 1)));
      plus_.resize(size, N_), minus_.resize(size, N_), axis_.resize(size, 0);
    }
  }

  int N_;
  std::int64_t offset_ = 0;
  std::vector<std::int64_t> plus_, minus_;
  std::vector<std::uint8_t> axis_;
};

inline CombState state_from_outcome(int N, const BAOutcome& o) {
  CombState s(N);
  for (const auto& e : o.stick_events) s.apply(e.at[0], e.at[1]);
  return s;
}

// ---------------------------------------------------------------------------
// Literal engine.

/// Vertex (x, y), |y| <= N, is encoded as x * (2N + 1) + (y + N).
class CombGraph {
 public:
  explicit CombGraph(int N) : N_(N), W_(2 * std::int64_t{N} + 1) { validate(comb_model(N)); }

  Family family() const { return Family::comb; }
  std::int64_t origin() const { return N_; }
  std::int64_t id(std::int64_t x, std::int64_t y) const { return x * W_ + y + N_; }
  std::int64_t id(const Coords& c) const {
    require(c.size() == 2 && std::abs(c[1]) <= N_, "comb: coordinates out of range");
    return id(c[0], c[1]);
  }
  std::int64_t x_of(std::int64_t v) const { return floor_div(v); }
  std::int64_t y_of(std::int64_t v) const { return v - floor_div(v) * W_ - N_; }
  Coords coords(std::int64_t v) const { return {x_of(v), y_of(v)}; }
  bool is_border(std::int64_t v) const { return std::abs(y_of(v)) == N_; }

  // up, down, left, right (the last two only on the axis)
  template <class F>
  bool any_neighbor(std::int64_t v, F&& f) const {
    const std::int64_t y = y_of(v);
    if (y < N_ && f(v + 1)) return true;
    if (y > -N_ && f(v - 1)) return true;
    if (y == 0) {
      if (f(v - W_)) return true;
      if (f(v + W_)) return true;
    }
    return false;
  }

  std::int64_t step(std::int64_t v, Engine& rng) const {
    if (y_of(v) == 0) {
      switch (uniform_below(rng, 4)) {
        case 0: return v + 1;
        case 1: return v - 1;
        case 2: return v - W_;
        default: return v + W_;
      }
    }
    return uniform_below(rng, 2) == 0 ? v + 1 : v - 1;
  }

 private:
  std::int64_t floor_div(std::int64_t v) const {
    const std::int64_t q = v / W_;
    return (v % W_ < 0) ? q - 1 : q;
  }

  int N_;
  std::int64_t W_;
};

// ---------------------------------------------------------------------------
// Embedded engine.

enum class CombEngine { literal, embedded };

inline CombEngine parse_engine(std::string_view s) {
  if (s == "literal") return CombEngine::literal;
  if (s == "embedded") return CombEngine::embedded;
  throw config_error("unknown comb engine '" + std::string(s) + "' (literal|embedded)");
}

struct CombRun {
  BAOutcome outcome;
  CombState state;
};

/// Per visit of (j, 0) that does not stick there: one uniform01 decides
/// death against q_kill(H+, H-); on death a second uniform01 picks the half
/// column, otherwise a fair coin picks the direction.
inline CombRun simulate_embedded(int N, Engine& rng, std::optional<std::int64_t> cap = {}) {
  CombRun run{{}, CombState(N)};
  CombState& s = run.state;
  BAOutcome& out = run.outcome;
  out.family = Family::comb;
  for (std::int64_t n = 1;; ++n) {
    if (cap && n > *cap) throw guard_error("particle cap " + std::to_string(*cap) + " exceeded");
    std::int64_t j = 0;
    for (;;) {
      const std::int64_t hp = s.h_plus(j), hm = s.h_minus(j);
      if (hp == 1 || hm == 1 || s.axis_sticky(j - 1) || s.axis_sticky(j + 1)) {
        if (j == 0) {
          out.xi = n;
          return run;
        }
        s.set_axis_sticky(j);
        out.stick_events.push_back({n, {j, 0}});
        break;
      }
      const std::int64_t up = hp - 1, down = hm - 1;
      if (uniform01(rng) < q_kill(up, down)) {
        const double p_up = static_cast<double>(down) / static_cast<double>(up + down);
        if (uniform01(rng) < p_up) {
          s.set_h_plus(j, up);
          out.stick_events.push_back({n, {j, up}});
        } else {
          s.set_h_minus(j, down);
          out.stick_events.push_back({n, {j, -down}});
        }
        break;
      }
      j += fair_coin(rng) ? 1 : -1;
    }
  }
}

inline CombRun simulate_comb(int N, Engine& rng, CombEngine engine,
                             std::optional<std::int64_t> cap = {}) {
  validate(comb_model(N));
  if (engine == CombEngine::embedded) return simulate_embedded(N, rng, cap);
  BAOutcome o = run_literal(CombGraph(N), rng, cap);
  CombState s = state_from_outcome(N, o);
  return {std::move(o), std::move(s)};
}

}  // namespace bam::comb
