#pragma once

// The border aggregation process over an abstract graph.
//
// Particles are emitted one at a time from the origin and walk until they
// stand next to a sticky vertex, where they stop and become sticky. The run
// ends with the first particle emitted while the origin already touches the
// sticky set; that particle is counted in xi (it sticks at the origin) but
// has no stick event. So stick_events.size() == xi - 1 and the sticky set
// before particle n is the border plus the first n - 1 event vertices.

#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bam/error.hpp"
#include "bam/rng.hpp"

namespace bam {

enum class Family { star, tree, box2d, disc2d, comb, cube };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::star: return "star";
    case Family::tree: return "tree";
    case Family::box2d: return "box2d";
    case Family::disc2d: return "disc2d";
    case Family::comb: return "comb";
    case Family::cube: return "cube";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  for (Family f : {Family::star, Family::tree, Family::box2d, Family::disc2d, Family::comb,
                   Family::cube})
    if (family_name(f) == s) return f;
  throw config_error("unknown family '" + std::string(s) + "'");
}

/// Graph family plus its size parameters. The origin, border and walk law
/// are implied by the family:
///   star(N, K)  K segments {0..N+1} glued at 0, border = the K far ends
///   tree(d, K)  d-ary tree of depth K, border = level K, walk moves away
///               from the root
///   box2d(N)    [-N..N]^2, border |x| = N or |y| = N
///   disc2d(N)   [-N..N]^2, border sqrt(x^2 + y^2) >= N - 1
///   comb(N)     Z^2 without off-axis horizontal edges, border |y| = N
///   cube(d, N)  [-N..N]^d, d >= 3, border |x|_2 >= N - 1
struct GraphModel {
  Family family = Family::star;
  int N = 1;  // segment length / lattice half-width / comb half-height
  int K = 2;  // star arms or tree depth
  int d = 2;  // tree arity or lattice dimension

  friend bool operator==(const GraphModel&, const GraphModel&) = default;
};

inline void validate(const GraphModel& m) {
  switch (m.family) {
    case Family::star:
      require(m.K >= 2, "star: K must be >= 2");
      require(m.N >= 1, "star: N must be >= 1");
      break;
    case Family::tree:
      require(m.d >= 2, "tree: d must be >= 2");
      require(m.K >= 1, "tree: K must be >= 1");
      break;
    case Family::box2d:
    case Family::disc2d:
      require(m.d == 2, "box2d/disc2d: d must be 2");
      require(m.N >= 2, "lattice: N must be >= 2");
      break;
    case Family::comb:
      require(m.N >= 2, "comb: N must be >= 2");
      break;
    case Family::cube:
      require(m.d >= 3, "cube: d must be >= 3 (use box2d/disc2d for d = 2)");
      require(m.N >= 2, "lattice: N must be >= 2");
      break;
  }
}

inline GraphModel star_model(int N, int K) { return {Family::star, N, K, 1}; }
inline GraphModel tree_model(int d, int K) { return {Family::tree, 0, K, d}; }
inline GraphModel box2d_model(int N) { return {Family::box2d, N, 0, 2}; }
inline GraphModel disc2d_model(int N) { return {Family::disc2d, N, 0, 2}; }
inline GraphModel comb_model(int N) { return {Family::comb, N, 0, 2}; }
inline GraphModel cube_model(int d, int N) { return {Family::cube, N, 0, d}; }

using Coords = std::vector<std::int64_t>;

struct StickEvent {
  std::int64_t n = 0;  // particle index, 1-based
  Coords at;           // family coordinates of the vertex that became sticky

  friend bool operator==(const StickEvent&, const StickEvent&) = default;
};

struct BAOutcome {
  Family family = Family::star;
  std::int64_t xi = 0;
  std::vector<StickEvent> stick_events;

  friend bool operator==(const BAOutcome&, const BAOutcome&) = default;
};

// ---------------------------------------------------------------------------
// Generic engine.

/// A graph with an origin, a border predicate and a walk law. Vertices are
/// 64-bit ids; for_each_neighbor visits neighbours in a fixed order and stops
/// early when the callback returns true.
template <class T>
concept Topology = requires(const T& t, std::int64_t v, Engine& rng) {
  { t.family() } -> std::same_as<Family>;
  { t.origin() } -> std::same_as<std::int64_t>;
  { t.is_border(v) } -> std::same_as<bool>;
  { t.step(v, rng) } -> std::same_as<std::int64_t>;
  { t.coords(v) } -> std::same_as<Coords>;
  t.any_neighbor(v, [](std::int64_t) { return true; });
};

struct HashedStickySet {
  std::unordered_set<std::int64_t> members;
  bool contains(std::int64_t v) const { return members.contains(v); }
  void insert(std::int64_t v) { members.insert(v); }
};

/// Steps the walk vertex by vertex and tests the stopping rule with the
/// topology's own neighbour enumeration. This is the reference
/// implementation that every fast engine is checked against.
template <Topology G>
BAOutcome run_literal(const G& g, Engine& rng, std::optional<std::int64_t> max_particles = {}) {
  HashedStickySet sticky;
  auto is_sticky = [&](std::int64_t w) { return g.is_border(w) || sticky.contains(w); };
  auto touches = [&](std::int64_t v) { return g.any_neighbor(v, is_sticky); };

  BAOutcome out;
  out.family = g.family();
  for (std::int64_t n = 1;; ++n) {
    if (max_particles && n > *max_particles)
      throw guard_error("particle cap " + std::to_string(*max_particles) + " exceeded");
    std::int64_t v = g.origin();
    while (!touches(v)) v = g.step(v, rng);
    if (v == g.origin()) {
      out.xi = n;
      return out;
    }
    sticky.insert(v);
    out.stick_events.push_back({n, g.coords(v)});
  }
}

}  // namespace bam
