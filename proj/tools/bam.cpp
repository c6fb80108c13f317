// bam: command-line runner for the border aggregation toolkit.
//
// Every command writes its data (CSV, or JSON for `analyze`) to --out or
// stdout, and a metadata record to --meta, <out>.meta.json, or stderr. Data
// files depend only on the arguments; the metadata also carries wall time.
//
// Exit codes: 0 success, 2 configuration error, 3 guard violation.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bam/bam.hpp"

using nlohmann::json;

namespace {

struct Context {
  std::vector<std::string> argv;
  std::string out_path;
  std::string meta_path;
  unsigned threads = bam::default_threads();
  std::uint64_t seed = 1;
  std::uint64_t reps = 0;
  json config = json::object();
  json summary = json::object();
};

Context ctx;

std::ostream& data_stream() {
  static std::ofstream file;
  if (ctx.out_path.empty()) return std::cout;
  if (!file.is_open()) {
    file.open(ctx.out_path, std::ios::binary);
    if (!file) throw bam::config_error("cannot open output file '" + ctx.out_path + "'");
  }
  return file;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw bam::config_error("cannot open '" + path + "'");
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw bam::config_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Where each option's value came from.
json option_sources(const CLI::App* app) {
  json src = json::object();
  for (const CLI::App* a = app; a != nullptr; a = a->get_parent()) {
    for (const CLI::Option* opt : a->get_options()) {
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help" || name == "config" || src.contains(name)) continue;
      bool on_command_line = false;
      for (const auto& arg : ctx.argv)
        on_command_line = on_command_line || arg == "--" + name || arg.rfind("--" + name + "=", 0) == 0;
      src[name] = on_command_line ? "flag" : opt->count() > 0 ? "config" : "default";
    }
  }
  return src;
}

void write_metadata(const CLI::App* leaf, const std::string& command, double seconds) {
  json meta;
  meta["command"] = command;
  meta["argv"] = ctx.argv;
  meta["generator"] = std::string(bam::kGeneratorId);
  if (leaf->get_option_no_throw("--seed") != nullptr) {
    meta["seed"] = ctx.seed;
    meta["reps"] = ctx.reps;
  }
  meta["threads"] = ctx.threads;
  meta["config"] = ctx.config;
  meta["sources"] = option_sources(leaf);
  meta["summary"] = ctx.summary;
  meta["wall_time_s"] = seconds;
  const std::string text = meta.dump(2) + "\n";
  if (!ctx.meta_path.empty()) {
    write_file(ctx.meta_path, text);
  } else if (!ctx.out_path.empty()) {
    write_file(ctx.out_path + ".meta.json", text);
  } else {
    std::cerr << text;
  }
}

template <class T>
std::string join(const std::vector<T>& v, char sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? std::string(1, sep) : "") << v[i];
  return os.str();
}

void summarize(const bam::SampleStats& s, const std::string& name) {
  ctx.summary[name + "_mean"] = s.mean();
  if (s.count > 1) ctx.summary[name + "_variance"] = s.variance();
  ctx.summary[name + "_min"] = s.min;
  ctx.summary[name + "_max"] = s.max;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// star

struct StarArgs {
  std::string engine = "urn";
  int N = 10, K = 2;
  int limit_K = 2;
  std::string grid = "0:3:31";
  int nodes = 4097;
};

void star_simulate(const StarArgs& a) {
  const auto engine = bam::star::parse_engine(a.engine);
  bam::validate(bam::star_model(a.N, a.K));
  ctx.config = {{"engine", a.engine}, {"N", a.N}, {"K", a.K}, {"reps", ctx.reps}, {"seed", ctx.seed}};
  const auto runs = bam::run_replicas(
      ctx.reps,
      [&](std::uint64_t r) {
        bam::Engine g = bam::make_stream(ctx.seed, r);
        return bam::star::simulate(engine, a.N, a.K, g);
      },
      ctx.threads);
  auto& os = data_stream();
  os << "replica,xi,survivors,istar,remaining" << (engine == bam::star::StarEngine::death ? ",tau_bar" : "")
     << '\n';
  bam::SampleStats xi, s;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& x = runs[r];
    os << r << ',' << x.xi << ',' << x.survivors << ',' << x.istar << ',' << join(x.remaining, ';');
    if (x.tau_bar) os << ',' << fmt(*x.tau_bar);
    os << '\n';
    xi.add(x.xi);
    s.add(x.survivors);
  }
  if (!runs.empty()) {
    summarize(xi, "xi");
    summarize(s, "survivors");
  }
}

void star_limit_law(const StarArgs& a) {
  double lo = 0, hi = 0;
  int count = 0;
  {
    std::vector<std::string> parts;
    std::stringstream ss(a.grid);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    bam::require(parts.size() == 3, "--grid must be lo:hi:count");
    try {
      lo = std::stod(parts[0]);
      hi = std::stod(parts[1]);
      count = std::stoi(parts[2]);
    } catch (const std::exception&) {
      throw bam::config_error("--grid must be lo:hi:count");
    }
    bam::require(count >= 2 && hi > lo && lo >= 0, "--grid needs 0 <= lo < hi and count >= 2");
  }
  const bam::star::LimitLawSpec spec{.K = a.limit_K, .nodes = a.nodes};
  bam::star::validate(spec);
  ctx.config = {{"K", a.limit_K}, {"grid", a.grid}, {"nodes", a.nodes}};
  auto& os = data_stream();
  // Diagonal a = (x, ..., x): joint survival G, joint density f_zeta and the
  // marginal CDF of one fixed arm.
  os << "a,G,f_zeta,marginal_cdf\n";
  for (int i = 0; i < count; ++i) {
    const double x = lo + (hi - lo) * i / (count - 1);
    const std::vector<double> pt(a.limit_K - 1, x);
    os << fmt(x) << ',' << fmt(bam::star::limit_cdf_G(pt, spec)) << ','
       << fmt(bam::star::limit_density_f_zeta(pt, a.limit_K)) << ','
       << fmt(bam::star::limit_marginal_cdf(x, spec)) << '\n';
  }
}

void star_exact(const StarArgs& a) {
  ctx.config = {{"N", a.N}, {"K", a.K}};
  const auto p = bam::star::exact_star_pmf(a.N, a.K);
  auto& os = data_stream();
  os << "S,xi,numerator,denominator\n";
  for (const auto& [s, q] : p)
    os << s << ',' << static_cast<std::int64_t>(a.N) * a.K - s + 1 << ',' << numerator(q) << ','
       << denominator(q) << '\n';
  ctx.summary["normalized"] = p.is_normalized();
  ctx.summary["mean_S"] = static_cast<double>(p.mean());
}

// ---------------------------------------------------------------------------
// tree

struct TreeArgs {
  int K = 4, d = 2;
  std::int64_t A = 365, m = 2, tail = 0;
};

void tree_exact(const TreeArgs& a) {
  ctx.config = {{"K", a.K}};
  const auto p = bam::tree::xi_tree_exact(a.K);
  auto& os = data_stream();
  os << "k,numerator,denominator\n";
  for (const auto& [k, q] : p) os << k << ',' << numerator(q) << ',' << denominator(q) << '\n';
  ctx.summary["mean"] = static_cast<double>(p.mean());
  ctx.summary["mean_exact"] = bam::to_string(p.mean());
  ctx.summary["normalized"] = p.is_normalized();
}

void tree_simulate(const TreeArgs& a) {
  const bam::tree::TreeGraph g(a.d, a.K);
  ctx.config = {{"d", a.d}, {"K", a.K}, {"reps", ctx.reps}, {"seed", ctx.seed}};
  const auto runs = bam::run_replicas(
      ctx.reps,
      [&](std::uint64_t r) {
        bam::Engine rng = bam::make_stream(ctx.seed, r);
        return bam::tree::simulate_tree(g, rng);
      },
      ctx.threads);
  auto& os = data_stream();
  // first_stick_i: index of the first particle stuck at level i.
  os << "replica,xi";
  for (int i = 1; i < a.K; ++i) os << ",first_stick_" << i;
  os << '\n';
  bam::SampleStats xi;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    os << r << ',' << runs[r].outcome.xi;
    for (int i = 1; i < a.K; ++i) os << ',' << runs[r].extras.first_stick[i];
    os << '\n';
    xi.add(runs[r].outcome.xi);
  }
  if (!runs.empty()) summarize(xi, "xi");
  if (a.K >= 2) ctx.summary["upper_bound"] = bam::tree::tree_upper_bound(a.d, a.K);
}

void tree_birthday(const TreeArgs& a) {
  bam::require(a.A >= 1 && a.m >= 1, "--A and --m must be positive");
  ctx.config = {{"A", a.A}, {"m", a.m}, {"reps", ctx.reps}, {"seed", ctx.seed}, {"tail", a.tail}};
  auto& os = data_stream();
  if (a.tail > 0) {
    // Exact P(zeta_{K,2} > t) for t = 1..tail.
    os << "t,tail\n";
    for (std::int64_t t = 1; t <= a.tail; ++t) os << t << ',' << fmt(bam::tree::birthday_tail(a.A, t)) << '\n';
    return;
  }
  const auto runs = bam::run_replicas(
      ctx.reps,
      [&](std::uint64_t r) {
        bam::Engine g = bam::make_stream(ctx.seed, r);
        return bam::tree::simulate_zeta_km(a.A, a.m, g);
      },
      ctx.threads);
  os << "replica,zeta\n";
  bam::SampleStats z;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    os << r << ',' << runs[r] << '\n';
    z.add(runs[r]);
  }
  if (!runs.empty()) summarize(z, "zeta");
}

// ---------------------------------------------------------------------------
// lattice

struct LatticeArgs {
  std::string kind = "box";
  int d = 2, N = 16;
  std::int64_t cap = 0;
  std::string snapshot;
  std::string shape = "segment";
  int r = 4;
  std::string x;
  std::int64_t enclosure = 0;
  std::string engine = "jump";
  double delta = 0.1;
};

void lattice_simulate(const LatticeArgs& a) {
  const auto m = bam::lattice::build_lattice_model(bam::lattice::parse_kind(a.kind), a.d, a.N);
  const bam::lattice::LatticeGraph g(m);
  ctx.config = {{"kind", a.kind}, {"d", a.d},     {"N", a.N},          {"reps", ctx.reps},
                {"seed", ctx.seed}, {"cap", a.cap}, {"snapshot", a.snapshot}};
  std::optional<std::int64_t> cap;
  if (a.cap > 0) cap = a.cap;
  const auto runs = bam::run_replicas(
      ctx.reps,
      [&](std::uint64_t r) {
        bam::Engine rng = bam::make_stream(ctx.seed, r);
        return bam::lattice::simulate_lattice(g, rng, cap);
      },
      ctx.threads);
  auto& os = data_stream();
  os << "replica,xi,radius\n";
  bam::SampleStats xi;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    os << r << ',' << runs[r].xi << ',' << fmt(bam::lattice::cluster_radius(runs[r])) << '\n';
    xi.add(runs[r].xi);
  }
  if (!runs.empty()) {
    summarize(xi, "xi");
    const auto c = bam::lattice::cardinalities(g);
    ctx.summary["vertices"] = c.vertices;
    ctx.summary["border"] = c.border;
    ctx.summary["border_distance"] = c.border_distance;
  }
  if (!a.snapshot.empty() && !runs.empty()) {
    const bool as_json = a.snapshot.size() >= 5 && a.snapshot.substr(a.snapshot.size() - 5) == ".json";
    write_file(a.snapshot, bam::export_snapshot(runs.front(), as_json ? bam::SnapshotFormat::json
                                                                      : bam::SnapshotFormat::csv,
                                                m.d));
  }
}

void lattice_hitmeasure(const LatticeArgs& a) {
  using namespace bam::lattice;
  const auto shape = parse_shape(a.shape);
  HittingConfig c;
  c.target = make_target(shape, a.r);
  if (!a.x.empty()) {
    const auto comma = a.x.find(',');
    bam::require(comma != std::string::npos, "--x must be X,Y");
    try {
      c.source = {std::stoll(a.x.substr(0, comma)), std::stoll(a.x.substr(comma + 1))};
    } catch (const std::exception&) {
      throw bam::config_error("--x must be X,Y");
    }
  } else {
    bam::require(shape == Shape::segment, "--x is required unless --shape segment");
    c.source = segment_source(a.r);
  }
  c.reps = ctx.reps;
  c.seed = ctx.seed;
  c.enclosure = a.enclosure;
  c.threads = ctx.threads;
  bam::require(a.engine == "jump" || a.engine == "literal", "--engine must be jump or literal");
  c.engine = a.engine == "jump" ? HitEngine::jump : HitEngine::literal;
  ctx.config = {{"shape", a.shape},   {"r", a.r},
                {"x", json::array({c.source.first, c.source.second})},
                {"reps", ctx.reps},   {"seed", ctx.seed},
                {"enclosure", a.enclosure}, {"engine", a.engine}};
  const auto h = estimate_hitting_measure(c);
  auto& os = data_stream();
  os << "x,y,count,frequency\n";
  double max_h = 0;
  for (std::size_t i = 0; i < h.target.size(); ++i) {
    os << h.target[i].first << ',' << h.target[i].second << ',' << h.counts[i] << ',' << fmt(h.frequency(i))
       << '\n';
    max_h = std::max(max_h, h.frequency(i));
  }
  ctx.summary["total"] = h.total();
  ctx.summary["restarts"] = h.restarts;
  ctx.summary["max_H"] = max_h;
  ctx.summary["max_H_sqrt_r"] = max_h * std::sqrt(static_cast<double>(a.r));
}

void lattice_rings(const LatticeArgs& a) {
  const auto m = bam::disc2d_model(a.N);
  const bam::lattice::LatticeGraph g(m);
  const bam::lattice::RingSystem rings(a.delta, a.N);
  ctx.config = {{"N", a.N}, {"delta", a.delta}, {"reps", ctx.reps}, {"seed", ctx.seed}};
  const auto runs = bam::run_replicas(
      ctx.reps,
      [&](std::uint64_t r) {
        bam::Engine rng = bam::make_stream(ctx.seed, r);
        return bam::lattice::ring_crossing_stats(bam::lattice::simulate_lattice(g, rng), rings);
      },
      ctx.threads);
  auto& os = data_stream();
  os << "replica,k,radius,width,nu,zeta\n";
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (const auto& c : runs[r])
      os << r << ',' << c.k << ',' << fmt(rings.radii[c.k]) << ',' << fmt(c.width) << ',' << c.nu << ','
         << c.zeta << '\n';
  ctx.summary["rings"] = rings.count();
  ctx.summary["widths_ok"] = rings.widths_ok();
}

// ---------------------------------------------------------------------------
// comb

struct CombArgs {
  int N = 16;
  std::string engine = "embedded";
  std::string frontier;
  std::string snapshot;
};

void comb_simulate(const CombArgs& a) {
  const auto engine = bam::comb::parse_engine(a.engine);
  bam::validate(bam::comb_model(a.N));
  ctx.config = {{"N", a.N},           {"engine", a.engine},     {"reps", ctx.reps},
                {"seed", ctx.seed},   {"frontier", a.frontier}, {"snapshot", a.snapshot}};
  const auto runs = bam::run_replicas(
      ctx.reps,
      [&](std::uint64_t r) {
        bam::Engine g = bam::make_stream(ctx.seed, r);
        return bam::comb::simulate_comb(a.N, g, engine);
      },
      ctx.threads);
  auto& os = data_stream();
  os << "replica,xi\n";
  bam::SampleStats xi;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    os << r << ',' << runs[r].outcome.xi << '\n';
    xi.add(runs[r].outcome.xi);
  }
  if (!runs.empty()) summarize(xi, "xi");
  if (!a.frontier.empty() && !runs.empty()) {
    std::ostringstream f;
    runs.front().state.write_frontier_csv(f);
    write_file(a.frontier, f.str());
  }
  if (!a.snapshot.empty() && !runs.empty())
    write_file(a.snapshot, bam::export_snapshot(runs.front().outcome, bam::SnapshotFormat::csv));
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string in;
  std::string against;
  std::string exact;
  std::string column = "xi";
};

std::vector<std::vector<std::string>> read_csv(const std::string& path, std::vector<std::string>& header) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  header.clear();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (header.empty()) {
      header = cells;
      continue;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw bam::config_error("column '" + name + "' not found in '" + path + "'");
}

double to_double(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw bam::config_error("bad number '" + s + "' in '" + path + "'");
}

// Input: CSV with columns N and mean (header required).
void analyze_fit(const AnalyzeArgs& a) {
  ctx.config = {{"in", a.in}};
  std::vector<std::string> header;
  const auto rows = read_csv(a.in, header);
  const auto iN = column_index(header, "N", a.in), im = column_index(header, "mean", a.in);
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    bam::require(r.size() == header.size(), "ragged row in '" + a.in + "'");
    pts.emplace_back(to_double(r[iN], a.in), to_double(r[im], a.in));
  }
  const json j = bam::fit_scaling(pts);
  data_stream() << j.dump(2) << '\n';
  ctx.summary = j;
}

bam::SampleStats sample_column(const std::string& path, const std::string& column) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, header);
  const auto idx = column_index(header, column, path);
  bam::SampleStats s;
  for (const auto& r : rows) {
    bam::require(r.size() == header.size(), "ragged row in '" + path + "'");
    const double v = to_double(r[idx], path);
    bam::require(v == std::floor(v), "column '" + column + "' is not integer-valued");
    s.add(static_cast<std::int64_t>(v));
  }
  bam::require(s.count > 0, "no rows in '" + path + "'");
  return s;
}

// Empirical law of --column in --in against another sample (--against) or an
// exact pmf CSV k,numerator,denominator (--exact).
void analyze_compare(const AnalyzeArgs& a) {
  bam::require(a.against.empty() != a.exact.empty(), "give exactly one of --against and --exact");
  ctx.config = {{"in", a.in}, {"column", a.column}, {"against", a.against}, {"exact", a.exact}};
  const auto s = sample_column(a.in, a.column);
  json j;
  j["n"] = s.count;
  j["mean"] = s.mean();
  if (!a.against.empty()) {
    const auto t = sample_column(a.against, a.column);
    j["n_against"] = t.count;
    j["mean_against"] = t.mean();
    j["tv"] = bam::tv_distance(s.empirical_pmf(), t.empirical_pmf());
  } else {
    std::vector<std::string> header;
    const auto rows = read_csv(a.exact, header);
    const auto ik = column_index(header, "k", a.exact), in = column_index(header, "numerator", a.exact),
               id = column_index(header, "denominator", a.exact);
    bam::Pmf p;
    for (const auto& r : rows) {
      bam::require(r.size() == header.size(), "ragged row in '" + a.exact + "'");
      try {
        p.add(std::stoll(r[ik]), bam::Rational(bam::BigInt(r[in]), bam::BigInt(r[id])));
      } catch (const std::exception&) {
        throw bam::config_error("bad row in '" + a.exact + "'");
      }
    }
    bam::require(p.is_normalized(), "exact pmf in '" + a.exact + "' does not sum to 1");
    const auto chi = bam::chi_square_gof(s.histogram, p.to_double());
    j["tv"] = bam::tv_distance(s.empirical_pmf(), p.to_double());
    j["exact_mean"] = static_cast<double>(p.mean());
    j["chi_square"] = chi.statistic;
    j["dof"] = chi.dof;
    j["p_value"] = chi.p_value;
  }
  data_stream() << j.dump(2) << '\n';
  ctx.summary = j;
}

}  // namespace

int main(int argc, char** argv) {
  ctx.argv.assign(argv, argv + argc);
  CLI::App app{"Border aggregation simulator"};
  app.set_config("--config", "", "TOML/INI file; [star.simulate]-style sections set subcommand options");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--out", ctx.out_path, "Data output file (default: stdout)");
  app.add_option("--meta", ctx.meta_path, "Metadata JSON file (default: <out>.meta.json, or stderr)");
  app.add_option("--threads", ctx.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  std::function<void()> action;
  std::map<const CLI::App*, std::uint64_t> default_reps;
  auto leaf_cmd = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    return parent->add_subcommand(name, help);
  };
  auto add_seed_reps = [&](CLI::App* c, std::uint64_t reps) {
    default_reps[c] = reps;
    c->add_option("--seed", ctx.seed, "Root seed")->capture_default_str();
    c->add_option("--reps", ctx.reps, "Replicas")->default_str(std::to_string(reps));
  };

  // star
  StarArgs star;
  auto* star_cmd = app.add_subcommand("star", "Star graph: K segments of length N+1");
  star_cmd->require_subcommand(1);
  auto* ss = leaf_cmd(star_cmd, "simulate", "Simulate S_N(K) and xi");
  ss->add_option("--engine", star.engine, "walk | urn | death")->capture_default_str();
  ss->add_option("--N", star.N)->capture_default_str();
  ss->add_option("--K", star.K)->capture_default_str();
  add_seed_reps(ss, 1000);
  ss->callback([&] { action = [&] { star_simulate(star); }; });
  auto* sl = leaf_cmd(star_cmd, "limit-law", "Limit law of the rescaled survivors on a diagonal grid");
  sl->add_option("--K", star.limit_K)->capture_default_str();
  sl->add_option("--grid", star.grid, "lo:hi:count")->capture_default_str();
  sl->add_option("--nodes", star.nodes, "Quadrature nodes")->capture_default_str();
  sl->callback([&] { action = [&] { star_limit_law(star); }; });
  auto* se = leaf_cmd(star_cmd, "exact", "Exact law of S_N(K)");
  se->add_option("--N", star.N)->capture_default_str();
  se->add_option("--K", star.K)->capture_default_str();
  se->callback([&] { action = [&] { star_exact(star); }; });

  // tree
  TreeArgs tree;
  auto* tree_cmd = app.add_subcommand("tree", "d-ary tree of depth K");
  tree_cmd->require_subcommand(1);
  auto* te = leaf_cmd(tree_cmd, "exact", "Exact law of xi_K on the binary tree");
  te->add_option("--K", tree.K)->capture_default_str();
  te->callback([&] { action = [&] { tree_exact(tree); }; });
  auto* ts = leaf_cmd(tree_cmd, "simulate", "Simulate xi_K");
  ts->add_option("--d", tree.d)->capture_default_str();
  ts->add_option("--K", tree.K)->capture_default_str();
  add_seed_reps(ts, 1000);
  ts->callback([&] { action = [&] { tree_simulate(tree); }; });
  auto* tb = leaf_cmd(tree_cmd, "birthday", "Generalized birthday counts zeta over A outcomes");
  tb->add_option("--A", tree.A)->capture_default_str();
  tb->add_option("--m", tree.m)->capture_default_str();
  tb->add_option("--tail", tree.tail, "Print the exact tail P(zeta > t), t <= tail, instead of sampling")
      ->capture_default_str();
  add_seed_reps(tb, 1000);
  tb->callback([&] { action = [&] { tree_birthday(tree); }; });

  // lattice
  LatticeArgs lat;
  auto* lat_cmd = app.add_subcommand("lattice", "Boxes in Z^d");
  lat_cmd->require_subcommand(1);
  auto* lsim = leaf_cmd(lat_cmd, "simulate", "Simulate xi on box, disc or cube");
  lsim->add_option("--kind", lat.kind, "box | disc | cube")->capture_default_str();
  lsim->add_option("--d", lat.d)->capture_default_str();
  lsim->add_option("--N", lat.N)->capture_default_str();
  lsim->add_option("--cap", lat.cap, "Particle cap per run (0: none)")->capture_default_str();
  lsim->add_option("--snapshot", lat.snapshot, "Stick order of replica 0 (.csv or .json)");
  add_seed_reps(lsim, 100);
  lsim->callback([&] { action = [&] { lattice_simulate(lat); }; });
  auto* lh = leaf_cmd(lat_cmd, "hitmeasure", "First-hit distribution of a finite set");
  lh->add_option("--shape", lat.shape, "point | cross | segment")->capture_default_str();
  lh->add_option("--r", lat.r, "Segment length")->capture_default_str();
  lh->add_option("--x", lat.x, "Start X,Y (segment default: (0, round(r^1.5 ln r)))");
  lh->add_option("--enclosure", lat.enclosure, "Restart radius (0: 100 |x|)")->capture_default_str();
  lh->add_option("--engine", lat.engine, "jump | literal")->capture_default_str();
  add_seed_reps(lh, 100000);
  lh->callback([&] { action = [&] { lattice_hitmeasure(lat); }; });
  auto* lr = leaf_cmd(lat_cmd, "rings", "First arrivals on rings r_k = k^(3-delta), disc model");
  lr->add_option("--N", lat.N)->capture_default_str();
  lr->add_option("--delta", lat.delta)->capture_default_str();
  add_seed_reps(lr, 50);
  lr->callback([&] { action = [&] { lattice_rings(lat); }; });

  // comb
  CombArgs comb;
  auto* comb_cmd = app.add_subcommand("comb", "Comb lattice");
  comb_cmd->require_subcommand(1);
  auto* cs = leaf_cmd(comb_cmd, "simulate", "Simulate xi on the comb");
  cs->add_option("--N", comb.N)->capture_default_str();
  cs->add_option("--engine", comb.engine, "literal | embedded")->capture_default_str();
  cs->add_option("--frontier", comb.frontier, "Frontier CSV j,h_plus,h_minus of replica 0");
  cs->add_option("--snapshot", comb.snapshot, "Stick order CSV of replica 0");
  add_seed_reps(cs, 1000);
  cs->callback([&] { action = [&] { comb_simulate(comb); }; });

  // analyze
  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "Post-processing of CSV outputs");
  an_cmd->require_subcommand(1);
  auto* af = leaf_cmd(an_cmd, "fit", "Fit log(mean) = c + alpha log(N) from CSV columns N,mean");
  af->add_option("--in", an.in)->required();
  af->callback([&] { action = [&] { analyze_fit(an); }; });
  auto* ac = leaf_cmd(an_cmd, "compare", "Compare a sample column with another sample or an exact pmf");
  ac->add_option("--in", an.in)->required();
  ac->add_option("--column", an.column)->capture_default_str();
  ac->add_option("--against", an.against, "Second sample CSV");
  ac->add_option("--exact", an.exact, "Exact pmf CSV k,numerator,denominator");
  ac->callback([&] { action = [&] { analyze_compare(an); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const CLI::App* leaf = &app;
  std::string command;
  while (!leaf->get_subcommands().empty()) {
    leaf = leaf->get_subcommands().front();
    command += (command.empty() ? "" : " ") + leaf->get_name();
  }
  if (default_reps.contains(leaf)) {
    if (leaf->get_option("--reps")->count() == 0) ctx.reps = default_reps[leaf];
  } else {
    ctx.seed = 0;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    action();
    data_stream().flush();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_metadata(leaf, command, seconds);
  } catch (const bam::guard_error& e) {
    std::cerr << "guard: " << e.what() << '\n';
    return 3;
  } catch (const bam::config_error& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
