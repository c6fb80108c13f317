// Acceptance suite: one PASS/FAIL line per criterion.
//
//   bam_acceptance            run all criteria
//   bam_acceptance 3 7        run criteria 3 and 7
//
// Exits nonzero if any selected criterion fails. Runtime budgets count as
// part of each criterion.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bam/bam.hpp"

using namespace bam;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<void(Verdict&)> run;
};

std::vector<std::pair<double, double>> log_points(const std::vector<int>& Ns, const std::vector<double>& means) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < Ns.size(); ++i) pts.emplace_back(Ns[i], means[i]);
  return pts;
}

// Mean xi over `reps` replicas of model(N), seeded per N.
double mean_xi(const GraphModel& m, std::uint64_t reps, std::uint64_t seed) {
  const auto xs = run_replicas(reps, [&](std::uint64_t r) { return run_ba(m, seed, r).xi; });
  SampleStats s;
  for (auto x : xs) s.add(x);
  return s.mean();
}

void exact_tree_tables(Verdict& v) {
  const Pmf xi4{{4, Rational(1, 8)}, {5, Rational(1, 4)}, {6, Rational(5, 16)}, {7, Rational(15, 64)},
                {8, Rational(5, 64)}};
  const Pmf xi5{{5, Rational(1, 64)},        {6, Rational(3, 64)},          {7, Rational(45, 512)},
                {8, Rational(535, 4096)},    {9, Rational(1335, 8192)},     {10, Rational(355, 2048)},
                {11, Rational(5115, 32768)}, {12, Rational(30525, 262144)}, {13, Rational(9075, 131072)},
                {14, Rational(32175, 1048576)}, {15, Rational(75075, 8388608)},
                {16, Rational(10725, 8388608)}};
  v.check(tree::xi_tree_exact(4) == xi4, "xi_4 table");
  v.check(tree::xi_tree_exact(5) == xi5, "xi_5 table");
  v.detail << "xi_4 and xi_5 match the reference tables (" << xi5.size() << " atoms for K=5)";
}

void tree_means(Verdict& v) {
  const double reference[] = {3.5, 5.89, 9.82, 16.4, 27.6, 46.8};
  v.detail << "E xi_K, K=3..8:";
  for (int K = 3; K <= 8; ++K) {
    const double m = static_cast<double>(tree::xi_tree_exact(K).mean());
    const double rel = std::abs(m / reference[K - 3] - 1);
    v.detail << ' ' << m;
    v.check(rel < 0.005, "K=" + std::to_string(K) + " off by " + std::to_string(rel));
  }
}

void tree_simulation(Verdict& v) {
  const std::uint64_t reps = 1'000'000;
  const auto xs = run_replicas(reps, [](std::uint64_t r) {
    Engine g = make_stream(301, r);
    return tree::simulate_tree(2, 4, g).outcome.xi;
  });
  SampleStats s;
  for (auto x : xs) s.add(x);
  const double tv = tv_distance(s.empirical_pmf(), tree::xi_tree_exact(4).to_double());
  v.detail << "TV = " << tv << " over " << reps << " replicas";
  v.check(tv < 0.005, "TV >= 0.005");
}

void star_engines(Verdict& v) {
  const std::uint64_t reps = 100'000;
  std::uint64_t seed = 401;
  for (auto [N, K] : {std::pair{2, 2}, std::pair{2, 3}}) {
    const auto exact = star::exact_star_pmf(N, K).to_double();
    for (auto e : {star::StarEngine::walk, star::StarEngine::urn, star::StarEngine::death}) {
      const auto ss = run_replicas(reps, [&](std::uint64_t r) {
        Engine g = make_stream(seed, r);
        return star::simulate(e, N, K, g).survivors;
      });
      ++seed;
      SampleStats s;
      for (auto x : ss) s.add(x);
      const auto chi = chi_square_gof(s.histogram, exact);
      const char* name = e == star::StarEngine::walk ? "walk" : e == star::StarEngine::urn ? "urn" : "death";
      v.detail << " (" << N << ',' << K << ")/" << name << " p=" << chi.p_value;
      v.check(chi.p_value > 0.001, std::string(name) + " chi-square");
    }
  }
}

void tau_clt(Verdict& v) {
  const int N = 10'000;
  const auto z = run_replicas(100'000, [&](std::uint64_t r) {
    Engine g = make_stream(501, r);
    return star::standardize_tau(star::sample_tau(N, g), N);
  });
  const double ks = ks_distance(z, normal_cdf);
  const double be = star::berry_esseen_bound(N);
  v.detail << "KS = " << ks << ", Berry-Esseen bound = " << be;
  v.check(ks < be, "KS >= bound");
  v.check(ks < 0.02, "KS >= 0.02");
}

void limit_law(Verdict& v) {
  for (int K = 2; K <= 5; ++K) {
    const std::vector<double> zero(K - 1, 0.0);
    const double g0 = star::limit_cdf_G(zero, K);
    v.check(std::abs(g0 - 1) < 1e-8, "G(0) for K=" + std::to_string(K));
  }
  const auto f = [](double x) {
    const std::vector<double> a{x};
    return star::limit_density_f_zeta(a, 2);
  };
  const double i2 = star::detail::simpson(0.0, 8.0, 4001, f);
  const double i3 = star::detail::simpson(0.0, 8.0, 801, [](double x) {
    return star::detail::simpson(0.0, 8.0, 801, [x](double y) {
      const std::vector<double> a{x, y};
      return star::limit_density_f_zeta(a, 3);
    });
  });
  const std::vector<double> one{1.0};
  const double g1 = star::limit_cdf_G(one, 2), closed = 2 * normal_sf(std::sqrt(6.0) / 4);
  v.detail << "int f_zeta - 1: K=2 " << i2 - 1 << ", K=3 " << i3 - 1 << "; G(1) - closed form = " << g1 - closed;
  v.check(std::abs(i2 - 1) < 1e-3, "integral K=2");
  v.check(std::abs(i3 - 1) < 1e-3, "integral K=3");
  v.check(std::abs(g1 - closed) < 1e-6, "G(1) closed form");
}

void survivor_scaling(Verdict& v) {
  const std::vector<int> Ns{250, 500, 1000, 2000, 4000};
  const std::uint64_t reps = 20'000;
  for (int K = 2; K <= 4; ++K) {
    std::vector<double> means;
    for (int N : Ns) {
      const auto ss = run_replicas(reps, [&](std::uint64_t r) {
        Engine g = make_stream(700 + 10 * K + static_cast<std::uint64_t>(N), r);
        return star::simulate_death_coupling(N, K, g).survivors;
      });
      SampleStats s;
      for (auto x : ss) s.add(x);
      means.push_back(s.mean());
    }
    const auto fit = fit_scaling(log_points(Ns, means));
    v.detail << " K=" << K << " slope " << fit.alpha;
    v.check(std::abs(fit.alpha - 0.75) <= 0.05, "slope for K=" + std::to_string(K));
  }
}

void comb_closed_forms(Verdict& v) {
  double worst_sum = 0;
  for (double gamma : {0.01, 0.1, 0.5, 0.9, 1.0}) {
    double s = 0;
    for (std::int64_t j = -20000; j <= 20000; ++j) s += comb::p_j_gamma(j, gamma);
    worst_sum = std::max(worst_sum, std::abs(s - 1));
  }
  v.check(worst_sum < 1e-12, "p_j_gamma sums");

  const std::uint64_t reps = 1'000'000;
  const auto js = run_replicas(reps, [](std::uint64_t r) {
    Engine g = make_stream(801, r);
    return comb::simulate_killed_walk(0.5, g);
  });
  SampleStats s;
  for (auto j : js) s.add(j);
  double worst_z = 0;
  for (std::int64_t j = -5; j <= 5; ++j) {
    const double p = comb::p_j_gamma(j, 0.5);
    const auto it = s.histogram.find(j);
    const double freq = it == s.histogram.end() ? 0.0 : static_cast<double>(it->second) / reps;
    const double z = std::abs(freq - p) / std::sqrt(p * (1 - p) / reps);
    worst_z = std::max(worst_z, z);
  }
  v.check(worst_z <= 3, "killed walk frequencies");

  const int N = 100;
  bool bracket = true;
  for (int a = N / 2; a <= N - 1; ++a)
    for (int b = N / 2; b <= N - 1; ++b) {
      const double q = comb::q_kill(a, b);
      bracket = bracket && q >= 1.0 / N && q <= 2.0 / (N + 2);
    }
  v.check(bracket, "q_kill bracket");
  v.detail << "max |sum p - 1| = " << worst_sum << ", max |z| = " << worst_z
           << ", q_kill in [1/N, 2/(N+2)] on [N/2, N-1]^2: " << (bracket ? "yes" : "no");
}

void exponent(Verdict& v, const std::vector<int>& Ns, std::uint64_t reps, std::uint64_t seed,
              const std::function<GraphModel(int)>& model, double lo, double hi) {
  std::vector<double> means;
  for (int N : Ns) means.push_back(mean_xi(model(N), reps, seed + static_cast<std::uint64_t>(N)));
  const auto fit = fit_scaling(log_points(Ns, means));
  v.detail << "alpha = " << fit.alpha << " (means";
  for (double m : means) v.detail << ' ' << m;
  v.detail << ')';
  v.check(fit.alpha > lo && fit.alpha < hi, "alpha outside range");
}

void hitting(Verdict& v) {
  std::vector<double> scaled;
  for (int r : {4, 8, 16}) {
    lattice::HittingConfig c;
    c.target = lattice::make_target(lattice::Shape::segment, r);
    c.source = lattice::segment_source(r);
    c.reps = 1'000'000;
    c.seed = 1200 + static_cast<std::uint64_t>(r);
    const auto h = lattice::estimate_hitting_measure(c);
    v.check(h.total() == h.reps, "some run did not hit exactly one target point");
    double mx = 0;
    for (std::size_t i = 0; i < h.target.size(); ++i) mx = std::max(mx, h.frequency(i));
    scaled.push_back(mx * std::sqrt(static_cast<double>(r)));
    v.detail << " r=" << r << ": max H sqrt(r) = " << scaled.back();
  }
  const double mx = *std::max_element(scaled.begin(), scaled.end());
  const double mn = *std::min_element(scaled.begin(), scaled.end());
  v.check(mx <= 1.5 * mn, "max H sqrt(r) grows");
}

void universal_invariants(Verdict& v) {
  struct Case {
    GraphModel m;
    int runs;
  };
  const std::vector<Case> cases{
      {star_model(1, 2), 50},   {star_model(5, 3), 200},  {star_model(20, 4), 50},
      {tree_model(2, 6), 200},  {tree_model(3, 5), 100},  {box2d_model(8), 50},
      {box2d_model(20), 10},    {disc2d_model(12), 30},   {disc2d_model(24), 10},
      {cube_model(3, 6), 20},   {cube_model(4, 4), 10},   {comb_model(6), 200},
      {comb_model(24), 50},
  };
  std::int64_t total = 0;
  for (const auto& c : cases) {
    const auto b = xi_bounds(c.m);
    for (int r = 0; r < c.runs; ++r) {
      const auto o = run_ba(c.m, 1300, static_cast<std::uint64_t>(r));
      const auto bad = check_invariants(c.m, o, b);
      const std::string name = std::string(family_name(c.m.family)) + " N=" + std::to_string(c.m.N);
      v.check(!bad, name + ": " + bad.value_or(""));
      v.check(export_snapshot(o, SnapshotFormat::csv) ==
                  export_snapshot(run_ba(c.m, 1300, static_cast<std::uint64_t>(r)), SnapshotFormat::csv),
              name + ": rerun differs");
      ++total;
    }
  }
  // The literal engines, where the default engine is a different sampler.
  for (int r = 0; r < 50; ++r) {
    Engine g1 = make_stream(1301, r), g2 = make_stream(1301, r);
    const auto t = run_literal(tree::TreeGraph(2, 5), g1);
    v.check(!check_invariants(tree_model(2, 5), t), "literal tree");
    v.check(t == run_literal(tree::TreeGraph(2, 5), g2), "literal tree rerun");
    Engine g3 = make_stream(1302, r), g4 = make_stream(1302, r);
    const auto cb = comb::simulate_comb(8, g3, comb::CombEngine::literal).outcome;
    v.check(!check_invariants(comb_model(8), cb), "literal comb");
    v.check(cb == comb::simulate_comb(8, g4, comb::CombEngine::literal).outcome, "literal comb rerun");
    Engine g5 = make_stream(1303, r), g6 = make_stream(1303, r);
    const auto bx = run_literal(lattice::LatticeGraph(box2d_model(6)), g5);
    v.check(!check_invariants(box2d_model(6), bx), "literal box");
    v.check(bx == run_literal(lattice::LatticeGraph(box2d_model(6)), g6), "literal box rerun");
    total += 3;
  }
  v.detail << total << " runs: bounds, adjacency replay and reruns";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "exact tree tables", 1, exact_tree_tables},
      {2, "exact tree means", 5, tree_means},
      {3, "tree simulation vs exact law", 30, tree_simulation},
      {4, "star engines vs exact law", 120, star_engines},
      {5, "tau CLT and Berry-Esseen", 60, tau_clt},
      {6, "limit-law quadrature identities", 10, limit_law},
      {7, "survivor scaling N^{3/4}", 600, survivor_scaling},
      {8, "comb closed forms", 60, comb_closed_forms},
      {9, "comb exponent", 900,
       [](Verdict& v) { exponent(v, {8, 16, 32, 64}, 2000, 900, comb_model, 1.35, 1.65); }},
      {10, "disc exponent proxy", 1800,
       [](Verdict& v) { exponent(v, {16, 24, 32, 48, 64, 96}, 200, 1000, disc2d_model, 1.23, 1e9); }},
      {11, "Z^3 exponent proxy", 1800,
       [](Verdict& v) {
         exponent(v, {8, 12, 16, 24, 32}, 200, 1100, [](int N) { return cube_model(3, N); }, 1.4, 1e9);
       }},
      {12, "hitting measure", 600, hitting},
      {13, "universal invariants", 600, universal_invariants},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    try {
      selected.insert(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::cerr << "usage: bam_acceptance [criterion ids]\n";
      return 2;
    }
  }

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.check(secs < c.budget_s, "over time budget");
    failures += !v.pass;
    std::printf("AC%-2d %s  %s: %s (%.2f s, budget %.0f s)\n", c.id, v.pass ? "PASS" : "FAIL", c.title.c_str(),
                v.detail.str().c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
