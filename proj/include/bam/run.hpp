#pragma once

// One entry point for every family, and the checks every run must pass:
//   dist(v0, B) <= xi <= |G| - |B|
// and the replay of the stick order against the stopping rule.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>

#include "bam/comb.hpp"
#include "bam/core.hpp"
#include "bam/lattice.hpp"
#include "bam/rng.hpp"
#include "bam/star.hpp"
#include "bam/tree.hpp"

namespace bam {

/// Star runs use the literal walk, trees the path sampler, lattices the dense
/// grid and the comb its embedded walk.
inline BAOutcome run_ba(const GraphModel& m, Engine& rng, std::optional<std::int64_t> cap = {}) {
  validate(m);
  switch (m.family) {
    case Family::star: return run_literal(star::StarGraph(m.N, m.K), rng, cap);
    case Family::tree: return tree::simulate_tree(m.d, m.K, rng).outcome;
    case Family::box2d:
    case Family::disc2d:
    case Family::cube: return lattice::simulate_lattice(m, rng, cap);
    case Family::comb: return comb::simulate_embedded(m.N, rng, cap).outcome;
  }
  return {};
}

inline BAOutcome run_ba(const GraphModel& m, std::uint64_t seed, std::uint64_t replica = 0) {
  Engine rng = make_stream(seed, replica);
  return run_ba(m, rng);
}

struct Bounds {
  std::int64_t lower = 0;  // dist(v0, B)
  std::int64_t upper = 0;  // |G| - |B|; max int64 for the unbounded comb
};

inline Bounds xi_bounds(const GraphModel& m) {
  validate(m);
  switch (m.family) {
    case Family::star: {
      const star::StarGraph g(m.N, m.K);
      return {g.border_distance(), g.vertex_count() - g.border_count()};
    }
    case Family::tree: {
      const tree::TreeGraph g(m.d, m.K);
      return {m.K, g.internal_count()};
    }
    case Family::box2d:
    case Family::disc2d:
    case Family::cube: {
      const auto c = lattice::cardinalities(lattice::LatticeGraph(m));
      return {c.border_distance, c.vertices - c.border};
    }
    case Family::comb: return {m.N, std::numeric_limits<std::int64_t>::max()};
  }
  return {};
}

namespace detail {

template <class G>
std::optional<std::string> replay(const G& g, const BAOutcome& o) {
  std::unordered_set<std::int64_t> stuck;
  auto sticky = [&](std::int64_t w) { return g.is_border(w) || stuck.contains(w); };
  const std::int64_t origin = g.origin();
  for (std::size_t i = 0; i < o.stick_events.size(); ++i) {
    const auto& e = o.stick_events[i];
    const std::string where = "event " + std::to_string(i + 1) + ": ";
    if (e.n != static_cast<std::int64_t>(i) + 1) return where + "particle indices are not consecutive";
    if (g.any_neighbor(origin, sticky)) return where + "origin was already next to the sticky set";
    std::int64_t v = 0;
    try {
      v = g.id(e.at);
    } catch (const config_error& err) {
      return where + err.what();
    }
    if (v == origin) return where + "stuck at the origin";
    if (sticky(v)) return where + "vertex was already sticky";
    if (!g.any_neighbor(v, sticky)) return where + "vertex not adjacent to the sticky set";
    stuck.insert(v);
  }
  if (o.xi != static_cast<std::int64_t>(o.stick_events.size()) + 1)
    return "xi does not equal the number of stick events plus one";
  if (!g.any_neighbor(origin, sticky)) return "origin not adjacent to the final sticky set";
  return std::nullopt;
}

}  // namespace detail

/// Replays the stick order: each stuck vertex was free and adjacent to the
/// border or an earlier stuck vertex, the origin touched the sticky set only
/// after the last event, and xi = events + 1. Returns the first violation.
inline std::optional<std::string> check_adjacency(const GraphModel& m, const BAOutcome& o) {
  validate(m);
  if (o.family != m.family) return std::string("family mismatch");
  switch (m.family) {
    case Family::star: return detail::replay(star::StarGraph(m.N, m.K), o);
    case Family::tree: return detail::replay(tree::TreeGraph(m.d, m.K), o);
    case Family::box2d:
    case Family::disc2d:
    case Family::cube: return detail::replay(lattice::LatticeGraph(m), o);
    case Family::comb: return detail::replay(comb::CombGraph(m.N), o);
  }
  return std::nullopt;
}

/// Bounds plus replay; returns the first violation.
inline std::optional<std::string> check_invariants(const GraphModel& m, const BAOutcome& o,
                                                   const Bounds& b) {
  if (o.xi < b.lower || o.xi > b.upper)
    return "xi = " + std::to_string(o.xi) + " outside [" + std::to_string(b.lower) + ", " +
           std::to_string(b.upper) + "]";
  return check_adjacency(m, o);
}

inline std::optional<std::string> check_invariants(const GraphModel& m, const BAOutcome& o) {
  return check_invariants(m, o, xi_bounds(m));
}

}  // namespace bam
