#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bam/analysis.hpp"
#include "bam/lattice.hpp"
#include "bam/run.hpp"

using namespace bam;
using namespace bam::lattice;

TEST(LatticeModel, Validation) {
  EXPECT_EQ(build_lattice_model(Kind::box, 2, 5), box2d_model(5));
  EXPECT_EQ(build_lattice_model(Kind::cube, 3, 4), cube_model(3, 4));
  EXPECT_THROW(build_lattice_model(Kind::box, 3, 5), config_error);
  EXPECT_THROW(build_lattice_model(Kind::disc, 3, 5), config_error);
  EXPECT_THROW(build_lattice_model(Kind::cube, 2, 5), config_error);
  EXPECT_THROW(build_lattice_model(Kind::box, 2, 1), config_error);
  EXPECT_THROW(parse_kind("torus"), config_error);
}

TEST(LatticeModel, Cardinalities) {
  const auto box = cardinalities(LatticeGraph(box2d_model(2)));
  EXPECT_EQ(box.vertices, 25);
  EXPECT_EQ(box.border, 16);
  EXPECT_EQ(box.border_distance, 2);

  const auto disc = cardinalities(LatticeGraph(disc2d_model(2)));
  EXPECT_EQ(disc.border, 24);  // everything but the origin
  EXPECT_EQ(disc.border_distance, 1);

  // Cube d = 3, N = 2: Euclidean |x| >= 1 leaves only the origin.
  const auto cube = cardinalities(LatticeGraph(cube_model(3, 2)));
  EXPECT_EQ(cube.vertices, 125);
  EXPECT_EQ(cube.border, 124);

  // Disc N = 5: interior is x^2 + y^2 < 16.
  const auto d5 = cardinalities(LatticeGraph(disc2d_model(5)));
  std::int64_t inside = 0;
  for (int x = -5; x <= 5; ++x)
    for (int y = -5; y <= 5; ++y) inside += x * x + y * y < 16;
  EXPECT_EQ(d5.vertices - d5.border, inside);
  EXPECT_EQ(d5.border_distance, 4);
}

TEST(LatticeModel, DegenerateRunsEndImmediately) {
  for (int r = 0; r < 10; ++r) {
    EXPECT_EQ(run_ba(disc2d_model(2), 1, r).xi, 1);
    EXPECT_EQ(run_ba(cube_model(3, 2), 1, r).xi, 1);
  }
}

TEST(LatticeGraph, CoordinatesRoundTrip) {
  const LatticeGraph g(cube_model(4, 3));
  for (std::int64_t v = 0; v < g.cell_count(); v += 7) EXPECT_EQ(g.id(g.coords(v)), v);
  EXPECT_EQ(g.coords(g.origin()), Coords(4, 0));
  EXPECT_THROW(g.id(Coords{0, 0, 0, 4}), config_error);
}

TEST(LatticeEngine, DenseGridEqualsLiteralWalk) {
  for (const auto& m : {box2d_model(7), disc2d_model(9), cube_model(3, 5), cube_model(4, 3)}) {
    const LatticeGraph g(m);
    for (int r = 0; r < 20; ++r) {
      Engine a = make_stream(41, r), b = make_stream(41, r);
      EXPECT_EQ(simulate_lattice(g, a), run_literal(g, b)) << family_name(m.family);
    }
  }
}

TEST(LatticeEngine, BoundsAndAdjacency) {
  for (const auto& m : {box2d_model(10), disc2d_model(12), cube_model(3, 6)}) {
    const auto b = xi_bounds(m);
    for (int r = 0; r < 30; ++r) {
      const auto o = run_ba(m, 42, r);
      EXPECT_FALSE(check_invariants(m, o, b).has_value()) << *check_invariants(m, o, b);
      EXPECT_GE(o.xi, m.N - 1);
    }
  }
}

TEST(LatticeEngine, CapIsEnforced) {
  Engine g = make_stream(1);
  EXPECT_THROW(simulate_lattice(box2d_model(20), g, 3), guard_error);
}

TEST(LatticeEngine, BoxGrowsWithN) {
  double m8 = 0, m16 = 0;
  for (int r = 0; r < 200; ++r) {
    m8 += static_cast<double>(run_ba(box2d_model(8), 43, r).xi);
    m16 += static_cast<double>(run_ba(box2d_model(16), 43, r).xi);
  }
  EXPECT_GT(m16, m8);
}

TEST(LatticeEngine, ClusterRadiusNeverShrinks) {
  const auto o = run_ba(disc2d_model(20), 44);
  double r = 0;
  for (std::size_t i = 1; i <= o.stick_events.size(); ++i) {
    BAOutcome prefix{o.family, 0, {o.stick_events.begin(), o.stick_events.begin() + static_cast<std::ptrdiff_t>(i)}};
    const double ri = cluster_radius(prefix);
    EXPECT_GE(ri, r);
    r = ri;
  }
  EXPECT_LE(r, 20 * std::sqrt(2.0));
}

TEST(Rings, Geometry) {
  const RingSystem rings(0.1, 64);
  EXPECT_TRUE(rings.widths_ok());
  for (int k = 1; k < rings.count(); ++k) {
    EXPECT_GT(rings.radii[k], rings.radii[k - 1]);
    EXPECT_NEAR(rings.radii[k], std::pow(k, 2.9), 1e-9);
  }
  EXPECT_GE(rings.radii.back(), 64 * std::sqrt(2.0));
  EXPECT_EQ(rings.ring_of(0.0), 0);
  EXPECT_EQ(rings.ring_of(1.0), 1);
  EXPECT_EQ(rings.ring_of(1.5), 2);
  EXPECT_THROW(rings.ring_of(1e6), config_error);
  EXPECT_THROW(RingSystem(0.0, 10), config_error);
}

TEST(Rings, CrossingStats) {
  const RingSystem rings(0.1, 64);
  std::map<int, std::vector<std::int64_t>> zetas;
  for (int r = 0; r < 20; ++r) {
    const auto o = run_ba(disc2d_model(64), 45, r);
    const auto stats = ring_crossing_stats(o, rings);
    ASSERT_FALSE(stats.empty());
    EXPECT_EQ(stats.front().nu, o.xi);
    std::int64_t total = 0;
    for (std::size_t k = 0; k < stats.size(); ++k) {
      EXPECT_EQ(stats[k].k, static_cast<int>(k));
      EXPECT_GE(stats[k].zeta, 0);
      if (k + 1 < stats.size()) {
        EXPECT_GE(stats[k].nu, stats[k + 1].nu);
      }
      total += stats[k].zeta;
      zetas[stats[k].k].push_back(stats[k].zeta);
    }
    EXPECT_LE(total, o.xi);
  }
  EXPECT_THROW(ring_crossing_stats(run_ba(box2d_model(8), 1), rings), config_error);
}

TEST(Hitting, SquareExitLawIsExact) {
  // Against a direct solve of the exit problem by value iteration (L = 4).
  const std::int64_t L = 4;
  const lattice::detail::SquareExit ex(L);
  std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> hist;
  const int reps = 200000;
  Engine g = make_stream(46);
  for (int r = 0; r < reps; ++r) ++hist[ex.sample(g)];
  // Exact harmonic measure via Gauss-Seidel on the interior.
  const int n = 2 * L + 1;
  std::map<std::pair<std::int64_t, std::int64_t>, double> exact;
  for (std::int64_t s = 1 - L; s <= L - 1; ++s) {
    std::vector<double> u(n * n, 0.0);
    u[(s + L) * n + (2 * L)] = 1.0;  // boundary point (L, s)
    for (int it = 0; it < 5000; ++it)
      for (int y = 1; y < n - 1; ++y)
        for (int x = 1; x < n - 1; ++x)
          u[y * n + x] = 0.25 * (u[y * n + x + 1] + u[y * n + x - 1] + u[(y + 1) * n + x] + u[(y - 1) * n + x]);
    exact[{L, s}] = u[L * n + L];
  }
  double total = 0;
  for (const auto& [pt, p] : exact) {
    total += p;
    const double f = static_cast<double>(hist[pt]) / reps;
    EXPECT_NEAR(f, p, 4 * std::sqrt(p / reps) + 1e-4);
  }
  EXPECT_NEAR(total, 0.25, 1e-12);
  EXPECT_EQ(hist.count({L, L}), 0u);
}

TEST(Hitting, PointTarget) {
  HittingConfig c;
  c.target = make_target(Shape::point, 0);
  c.source = {3, -2};
  c.reps = 500;
  c.seed = 47;
  const auto h = estimate_hitting_measure(c);
  EXPECT_EQ(h.counts[0], 500u);
  EXPECT_EQ(h.total(), h.reps);
}

TEST(Hitting, CrossIsSymmetricAcrossTheDiagonal) {
  HittingConfig c;
  c.target = make_target(Shape::cross, 0);
  c.source = {40, 40};
  c.reps = 40000;
  c.seed = 48;
  const auto h = estimate_hitting_measure(c);
  EXPECT_EQ(h.total(), h.reps);
  // Targets (1,0), (-1,0), (0,1), (0,-1) seen from (40, 40): reflection in
  // the diagonal swaps (1,0) with (0,1) and (-1,0) with (0,-1).
  const double near = h.frequency(0) + h.frequency(2), far = h.frequency(1) + h.frequency(3);
  EXPECT_NEAR(h.frequency(0), h.frequency(2), 4 * std::sqrt(near / c.reps));
  EXPECT_NEAR(h.frequency(1), h.frequency(3), 4 * std::sqrt(far / c.reps));
  EXPECT_GT(near, far);
}

TEST(Hitting, JumpEngineMatchesLiteral) {
  HittingConfig c;
  c.target = make_target(Shape::segment, 4);
  c.source = {1, 9};
  c.enclosure = 120;
  c.reps = 40000;
  c.seed = 49;
  const auto fast = estimate_hitting_measure(c);
  c.engine = HitEngine::literal;
  c.seed = 50;
  const auto slow = estimate_hitting_measure(c);
  for (std::size_t i = 0; i < fast.counts.size(); ++i) {
    const double p = slow.frequency(i);
    EXPECT_NEAR(fast.frequency(i), p, 4 * std::sqrt(2 * p * (1 - p) / c.reps)) << i;
  }
}

TEST(Hitting, Errors) {
  HittingConfig c;
  c.target = make_target(Shape::point, 0);
  c.source = {0, 0};
  c.reps = 10;
  EXPECT_THROW(estimate_hitting_measure(c), config_error);
  c.source = {1, 0};
  c.reps = 0;
  EXPECT_THROW(estimate_hitting_measure(c), config_error);
  EXPECT_THROW(parse_shape("blob"), config_error);
}

TEST(Hitting, ResultIndependentOfThreads) {
  HittingConfig c;
  c.target = make_target(Shape::segment, 4);
  c.source = segment_source(4);
  c.reps = 5000;
  c.seed = 51;
  c.threads = 1;
  const auto a = estimate_hitting_measure(c);
  c.threads = 3;
  const auto b = estimate_hitting_measure(c);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.restarts, b.restarts);
}
