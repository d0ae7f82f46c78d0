#pragma once

// JSON field files:
//
//   {"dim": 2,
//    "grid": [{"id": "x0", "weight": 0.5, "reference": [[1,0],[0,1]]}, ...],
//    "fields": {"g0": {"x0": {"spd": [[1,0],[0,1]]}, "x1": {"cone": true}}, ...}}
//
// Matrices are row-major, either nested rows or a flat list of n*n numbers.
// A per-sample "reference" tensor r whitens every value at that sample on
// load (v -> r^{-1/2} v r^{-1/2}); saved files hold the whitened values and
// no references. Object keys are written in sorted order and doubles in
// shortest round-trip form, so load followed by save reproduces a saved
// file exactly.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "metgeo/error.hpp"
#include "metgeo/fiber_geodesics.hpp"
#include "metgeo/field_space.hpp"
#include "metgeo/spd_core.hpp"

namespace metgeo::cli {

using json = nlohmann::json;

struct FieldFile {
  GridPtr grid;
  std::map<std::string, MetricField> fields;

  const MetricField& field(const std::string& name) const {
    auto it = fields.find(name);
    if (it == fields.end()) detail::fail(ErrorKind::InvalidInput, "no field named '" + name + "'");
    return it->second;
  }
};

struct LoadOptions {
  bool normalize_weights = false;
  double positivity_tolerance = kDefaultPositivityTolerance;
  double symmetry_tolerance = 1e-12;
};

struct Loaded {
  FieldFile file;
  std::vector<std::string> warnings;
};

namespace detail {

using metgeo::detail::fail;

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorKind::InvalidInput, where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, where + ": non-finite number");
  return v;
}

/// Row-major n x n matrix from nested rows or a flat list.
inline Matrix matrix(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::InvalidInput, where + ": expected a matrix");
  std::vector<double> values;
  if (!j.empty() && j.front().is_array()) {
    if (j.size() != n) fail(ErrorKind::InvalidInput, where + ": expected " + std::to_string(n) + " rows");
    for (const auto& row : j) {
      if (!row.is_array() || row.size() != n)
        fail(ErrorKind::InvalidInput, where + ": every row needs " + std::to_string(n) + " entries");
      for (const auto& v : row) values.push_back(number(v, where));
    }
  } else {
    if (j.size() != n * n)
      fail(ErrorKind::InvalidInput, where + ": expected " + std::to_string(n * n) + " entries");
    for (const auto& v : j) values.push_back(number(v, where));
  }
  return Matrix::from_row_major(n, values);
}

inline SymTensor symmetric(const json& j, std::size_t n, const std::string& where, double tol,
                           std::vector<std::string>& warnings) {
  const Matrix m = matrix(j, n, where);
  const double asym = SymTensor::asymmetry(m);
  if (asym > tol * std::max(1.0, m.max_abs())) {
    std::ostringstream msg;
    msg << where << ": matrix asymmetric by " << asym << ", symmetrized";
    warnings.push_back(msg.str());
  }
  return SymTensor::symmetrize(m);
}

inline json rows(const SymTensor& s) {
  json out = json::array();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < s.dim(); ++j) row.push_back(s(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

/// One fiber value: {"spd": matrix} or {"cone": true}. Positive
/// semidefinite nonzero tensors collapse to the cone point with a warning.
inline FiberPoint parse_point(const json& j, std::size_t n, const std::string& where,
                              const LoadOptions& opts, std::vector<std::string>& warnings) {
  if (!j.is_object()) detail::fail(ErrorKind::InvalidInput, where + ": expected an object");
  const bool has_cone = j.contains("cone");
  const bool has_spd = j.contains("spd");
  if (has_cone == has_spd)
    detail::fail(ErrorKind::InvalidInput, where + ": give exactly one of \"spd\" or \"cone\"");
  if (has_cone) {
    if (j.at("cone") != true) detail::fail(ErrorKind::InvalidInput, where + ": \"cone\" must be true");
    return FiberPoint::cone(n);
  }
  const SymTensor s = detail::symmetric(j.at("spd"), n, where, opts.symmetry_tolerance, warnings);
  IngestedPoint in = ingest(s, opts.positivity_tolerance);
  if (in.collapsed) warnings.push_back(where + ": degenerate tensor collapsed to the cone point");
  return in.point;
}

inline json point_json(const FiberPoint& p) {
  if (p.is_cone()) return json{{"cone", true}};
  return json{{"spd", detail::rows(p.tensor().tensor())}};
}

inline Loaded parse_field_file(const json& j, const LoadOptions& opts = {}) {
  using detail::fail;
  Loaded out;
  if (!j.is_object()) fail(ErrorKind::InvalidInput, "field file: expected a JSON object");
  for (const char* key : {"dim", "grid", "fields"})
    if (!j.contains(key)) fail(ErrorKind::InvalidInput, std::string("field file: missing \"") + key + "\"");
  if (!j.at("dim").is_number_integer() || j.at("dim").get<long>() < 1)
    fail(ErrorKind::InvalidInput, "field file: \"dim\" must be a positive integer");
  const auto n = static_cast<std::size_t>(j.at("dim").get<long>());

  const json& grid_json = j.at("grid");
  if (!grid_json.is_array()) fail(ErrorKind::InvalidInput, "field file: \"grid\" must be a list");
  std::vector<Sample> samples;
  std::vector<std::optional<metgeo::detail::Whitening>> references;
  for (const auto& entry : grid_json) {
    if (!entry.is_object() || !entry.contains("id") || !entry.at("id").is_string() ||
        !entry.contains("weight"))
      fail(ErrorKind::InvalidInput, "field file: grid entries need a string \"id\" and a \"weight\"");
    const std::string id = entry.at("id").get<std::string>();
    samples.push_back({id, detail::number(entry.at("weight"), "grid[" + id + "].weight")});
    if (entry.contains("reference")) {
      const SymTensor r = detail::symmetric(entry.at("reference"), n, "grid[" + id + "].reference",
                                            opts.symmetry_tolerance, out.warnings);
      references.emplace_back(metgeo::detail::Whitening(SpdTensor::make(r, opts.positivity_tolerance)));
    } else {
      references.emplace_back();
    }
  }
  out.file.grid = SampleGrid::make(std::move(samples), n, opts.normalize_weights);
  const SampleGrid& grid = *out.file.grid;

  const json& fields_json = j.at("fields");
  if (!fields_json.is_object()) fail(ErrorKind::InvalidInput, "field file: \"fields\" must be an object");
  for (const auto& [name, values_json] : fields_json.items()) {
    if (!values_json.is_object())
      fail(ErrorKind::InvalidInput, "field '" + name + "': expected an object keyed by sample id");
    for (const auto& [id, v] : values_json.items()) {
      (void)v;
      grid.index_of(id);  // unknown ids are an error
    }
    std::vector<FiberPoint> values;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::string& id = grid[i].id;
      if (!values_json.contains(id))
        fail(ErrorKind::InvalidInput, "field '" + name + "': no value for sample " + id);
      const std::string where = name + "[" + id + "]";
      json value = values_json.at(id);
      if (references[i] && value.is_object() && value.contains("spd")) {
        const SymTensor raw = detail::symmetric(value.at("spd"), n, where, opts.symmetry_tolerance,
                                                out.warnings);
        value = json{{"spd", detail::rows(references[i]->whiten(raw))}};
      }
      values.push_back(parse_point(value, n, where, opts, out.warnings));
    }
    out.file.fields.emplace(name, MetricField(out.file.grid, std::move(values)));
  }
  return out;
}

inline json to_json(const FieldFile& f) {
  json grid = json::array();
  for (const auto& s : f.grid->samples()) grid.push_back(json{{"id", s.id}, {"weight", s.weight}});
  json fields = json::object();
  for (const auto& [name, field] : f.fields) {
    json values = json::object();
    for (std::size_t i = 0; i < field.size(); ++i) values[(*f.grid)[i].id] = point_json(field[i]);
    fields[name] = std::move(values);
  }
  return json{{"dim", f.grid->dim()}, {"grid", std::move(grid)}, {"fields", std::move(fields)}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) metgeo::detail::fail(ErrorKind::InvalidInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    metgeo::detail::fail(ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

inline Loaded load_field_file(const std::string& path, const LoadOptions& opts = {}) {
  return parse_field_file(read_json(path), opts);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) metgeo::detail::fail(ErrorKind::InvalidInput, "cannot write " + path);
  out << text;
}

inline void save_field_file(const std::string& path, const FieldFile& f) {
  write_text(path, dump(to_json(f)));
}

}  // namespace metgeo::cli
