#pragma once

// Stick-order export. One row per particle, the last row being the final
// particle at the origin:
//   CSV   n,<coords>,family
//   JSON  [{"n": 1, "coord": [...], "family": "..."}, ...]
// Coordinate columns: star arm,depth; tree path,level; box2d, disc2d and
// comb x,y; cube x1..xd.

#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bam/core.hpp"
#include "bam/error.hpp"

namespace bam {

enum class SnapshotFormat { csv, json };

inline std::vector<std::string> coord_names(Family f, int dim) {
  switch (f) {
    case Family::star: return {"arm", "depth"};
    case Family::tree: return {"path", "level"};
    case Family::box2d:
    case Family::disc2d:
    case Family::comb: return {"x", "y"};
    case Family::cube: {
      std::vector<std::string> names;
      for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
      return names;
    }
  }
  return {};
}

/// `dim` is only consulted for cube runs without stick events.
inline std::string export_snapshot(const BAOutcome& o, SnapshotFormat format, int dim = 3) {
  if (!o.stick_events.empty()) dim = static_cast<int>(o.stick_events.front().at.size());
  const auto names = coord_names(o.family, dim);
  const std::string family(family_name(o.family));
  std::vector<StickEvent> rows = o.stick_events;
  rows.push_back({o.xi, Coords(names.size(), 0)});

  if (format == SnapshotFormat::json) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back({{"n", r.n}, {"coord", r.at}, {"family", family}});
    return arr.dump() + "\n";
  }
  std::ostringstream os;
  os << 'n';
  for (const auto& name : names) os << ',' << name;
  os << ",family\n";
  for (const auto& r : rows) {
    os << r.n;
    for (auto c : r.at) os << ',' << c;
    os << ',' << family << '\n';
  }
  return os.str();
}

/// Inverse of the CSV export.
inline BAOutcome parse_snapshot_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "snapshot: empty input");
  std::size_t columns = 1;
  for (char c : line) columns += c == ',';
  require(columns >= 3 && line.rfind("n,", 0) == 0, "snapshot: bad header '" + line + "'");

  std::vector<StickEvent> rows;
  std::string family;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    require(cells.size() == columns, "snapshot: wrong column count in '" + line + "'");
    if (family.empty()) family = cells.back();
    require(cells.back() == family, "snapshot: mixed families");
    StickEvent e;
    try {
      e.n = std::stoll(cells[0]);
      for (std::size_t i = 1; i + 1 < cells.size(); ++i) e.at.push_back(std::stoll(cells[i]));
    } catch (const std::exception&) {
      throw config_error("snapshot: bad number in '" + line + "'");
    }
    rows.push_back(std::move(e));
  }
  require(!rows.empty(), "snapshot: no rows");
  BAOutcome o;
  o.family = parse_family(family);
  o.xi = rows.back().n;
  rows.pop_back();
  o.stick_events = std::move(rows);
  return o;
}

inline BAOutcome parse_snapshot_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_snapshot_csv(in);
}

}  // namespace bam
