/**
 *  @file   export.hpp
 *  @brief  CSV / PGM / JSON writers for quantifier fields and reports
 */
#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wigflow/flux.hpp"
#include "wigflow/quantifiers.hpp"
#include "wigflow/stability.hpp"

namespace wigflow {

enum class ExportFormat { csv, pgm, json };

/// %.17g, enough digits for an exact double round trip; NaN prints as `nan`.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header `x,k,value`, rows k-major, masked cells `nan`.
inline void write_field_csv(std::ostream& out, const QuantifierField& f) {
  out << "x,k,value\n";
  for (std::size_t j = 0; j < f.grid.nk(); ++j) {
    for (std::size_t i = 0; i < f.grid.nx(); ++i) {
      out << format_double(f.grid.x(i)) << ',' << format_double(f.grid.k(j)) << ','
          << format_double(f.masked(i, j) ? std::nan("") : f.at(i, j)) << '\n';
    }
  }
}

struct CsvRow {
  double x, k, value;
};

inline std::vector<CsvRow> read_field_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string line;
  std::getline(in, line);
  if (line != "x,k,value") throw Error(ErrorKind::io, "unexpected CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, c, ',');
    rows.push_back({std::stod(a), std::stod(b), c == "nan" ? std::nan("") : std::stod(c)});
  }
  return rows;
}

/// Plain-text P2 map, width nx, height nk, rows in the same k order as the
/// CSV. Unmasked values are min-max scaled onto 0..65535; masked cells are 0.
inline void write_field_pgm(std::ostream& out, const QuantifierField& f) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    if (f.mask[idx]) continue;
    lo = std::min(lo, f.values[idx]);
    hi = std::max(hi, f.values[idx]);
  }
  const double span = hi - lo;
  out << "P2\n# " << to_string(f.quantity) << "\n" << f.grid.nx() << ' ' << f.grid.nk() << "\n65535\n";
  for (std::size_t j = 0; j < f.grid.nk(); ++j) {
    for (std::size_t i = 0; i < f.grid.nx(); ++i) {
      long level = 0;
      if (!f.masked(i, j) && span > 0.0) level = std::lround((f.at(i, j) - lo) / span * 65535.0);
      out << level << (i + 1 == f.grid.nx() ? '\n' : ' ');
    }
  }
}

inline nlohmann::json grid_to_json(const PhaseGrid& g) {
  return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"k_min", g.k_min()},
          {"k_max", g.k_max()}, {"nx", g.nx()},       {"nk", g.nk()}};
}

inline void write_field_json(std::ostream& out, const QuantifierField& f) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    values.push_back(f.mask[idx] ? nlohmann::json(nullptr) : nlohmann::json(f.values[idx]));
  }
  nlohmann::json doc{{"quantity", to_string(f.quantity)}, {"grid", grid_to_json(f.grid)}, {"values", values}};
  out << doc.dump(2) << '\n';
}

inline void write_field(std::ostream& out, const QuantifierField& f, ExportFormat format) {
  switch (format) {
    case ExportFormat::csv: write_field_csv(out, f); break;
    case ExportFormat::pgm: write_field_pgm(out, f); break;
    case ExportFormat::json: write_field_json(out, f); break;
  }
}

inline nlohmann::json report_to_json(const EquilibriumReport& r) {
  const Jacobian2& j = r.jacobian;
  return {{"point", {r.point.x, r.point.k}},
          {"jacobian", {j.j11, j.j12, j.j21, j.j22}},
          {"trace", r.trace},
          {"det", r.det},
          {"delta", r.delta},
          {"curl", r.curl},
          {"inv", r.inv},
          {"classification", to_string(r.classification)}};
}

inline nlohmann::json orbit_to_json(const OrbitPath& orbit) {
  nlohmann::json vertices = nlohmann::json::array();
  nlohmann::json normals = nlohmann::json::array();
  for (std::size_t i = 0; i < orbit.vertices.size(); ++i) {
    vertices.push_back({orbit.vertices[i].x, orbit.vertices[i].k});
    normals.push_back({orbit.normals[i].x, orbit.normals[i].k});
  }
  return {{"period", orbit.period},
          {"energy_drift", orbit.energy_drift},
          {"counterclockwise", orbit.counterclockwise},
          {"vertices", vertices},
          {"normals", normals}};
}

}  // namespace wigflow
