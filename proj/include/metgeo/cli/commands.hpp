#pragma once

// The metgeo command line. run() takes the arguments after the program name
// and returns the process exit code; nothing here calls std::exit.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metgeo/cli/field_file.hpp"
#include "metgeo/parallel.hpp"
#include "metgeo/verification.hpp"

namespace metgeo::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kInputError = 2, kDomainError = 3 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::NotPositiveDefinite: return kInputError;
    case ErrorKind::OutOfDomain:
    case ErrorKind::NotInExpImage: return kDomainError;
  }
  return kInputError;
}

namespace detail {

inline std::string full(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline std::string rounded(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

/// Text goes to `path` when given, else to `out`.
inline void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty())
    out << text;
  else
    write_text(path, text);
}

inline std::string sibling_csv(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return path.substr(0, dot) + ".csv";
  return path + ".csv";
}

struct FieldPair {
  Loaded loaded;
  const MetricField* f0 = nullptr;
  const MetricField* f1 = nullptr;
};

inline FieldPair load_pair(const std::string& file, const std::string& name0, const std::string& name1,
                           const LoadOptions& opts, std::ostream& err) {
  FieldPair p{load_field_file(file, opts)};
  for (const auto& w : p.loaded.warnings) err << "warning: " << w << "\n";
  p.f0 = &p.loaded.file.field(name0);
  p.f1 = &p.loaded.file.field(name1);
  return p;
}

inline json tensor_json(const SymTensor& s) { return rows(s); }

// ---------------------------------------------------------------------------

struct Common {
  std::string file, field0, field1, out, format;
  bool normalize_weights = false;
};

inline void add_common(CLI::App* sub, Common& c) {
  sub->add_option("file", c.file, "field file (JSON)")->required();
  sub->add_option("field0", c.field0, "name of the first field")->required();
  sub->add_option("field1", c.field1, "name of the second field")->required();
  sub->add_flag("--normalize-weights", c.normalize_weights, "rescale grid weights to sum to 1");
  sub->add_option("--out", c.out, "output path");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

inline int cmd_dist(const Common& c, std::ostream& out, std::ostream& err) {
  LoadOptions opts;
  opts.normalize_weights = c.normalize_weights;
  const FieldPair p = load_pair(c.file, c.field0, c.field1, opts, err);
  const MetricField& f0 = *p.f0;
  const MetricField& f1 = *p.f1;
  const std::vector<double> d = pointwise_distances(f0, f1);
  const double total = field_distance(f0, f1);
  const SampleGrid& grid = *f0.grid();

  std::ostringstream csv;
  csv << "id,weight,distance,case\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    csv << grid[i].id << "," << full(grid[i].weight) << "," << full(d[i]) << ","
        << to_string(classify(f0[i], f1[i]).tag) << "\n";

  if (c.format == "json") {
    json samples = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i)
      samples.push_back({{"id", grid[i].id},
                         {"weight", grid[i].weight},
                         {"distance", d[i]},
                         {"case", std::string(to_string(classify(f0[i], f1[i]).tag))}});
    emit(out, c.out, dump(json{{"distance", total}, {"samples", std::move(samples)}}));
  } else if (c.format == "csv") {
    emit(out, c.out, "# distance," + full(total) + "\n" + csv.str());
  } else {
    out << "distance " << rounded(total) << "\n";
    std::size_t width = 2;
    for (const auto& s : grid.samples()) width = std::max(width, s.id.size());
    out << std::left << std::setw(static_cast<int>(width)) << "id" << "  " << std::setw(12) << "weight"
        << "  " << std::setw(12) << "d_x" << "  case\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << std::setw(static_cast<int>(width)) << grid[i].id << "  " << std::setw(12) << rounded(grid[i].weight)
          << "  " << std::setw(12) << rounded(d[i]) << "  " << to_string(classify(f0[i], f1[i]).tag) << "\n";
    out << std::right;
    if (!c.out.empty()) write_text(c.out, "# distance," + full(total) + "\n" + csv.str());
  }
  return kOk;
}

inline int cmd_geodesic(const Common& c, std::size_t t_samples, std::ostream& out, std::ostream& err) {
  if (t_samples < 2) metgeo::detail::fail(ErrorKind::InvalidInput, "--t-samples must be at least 2");
  LoadOptions opts;
  opts.normalize_weights = c.normalize_weights;
  const FieldPair p = load_pair(c.file, c.field0, c.field1, opts, err);
  const FieldPath path = sample_field_geodesic(*p.f0, *p.f1, t_samples);
  const SampleGrid& grid = *p.f0->grid();
  const FieldClassification cls = classify_fields(*p.f0, *p.f1);

  std::ostringstream csv;
  csv << "t,id,fourth_root_det,case\n";
  for (const auto& [t, field] : path)
    for (std::size_t i = 0; i < grid.size(); ++i)
      csv << full(t) << "," << grid[i].id << ","
          << full(field[i].is_cone() ? 0.0 : fourth_root_det(field[i].tensor())) << ","
          << to_string(cls.cases[i].tag) << "\n";
  if (c.format == "csv") {
    emit(out, c.out, csv.str());
    return kOk;
  }

  FieldFile stream{p.f0->grid(), {}};
  const int digits = std::max<int>(3, static_cast<int>(std::to_string(t_samples - 1).size()));
  json times = json::array();
  for (std::size_t j = 0; j < path.size(); ++j) {
    std::ostringstream name;
    name << "step_" << std::setw(digits) << std::setfill('0') << j;
    stream.fields.emplace(name.str(), path[j].second);
    times.push_back(path[j].first);
  }
  json j = to_json(stream);
  j["times"] = std::move(times);
  emit(out, c.out, dump(j));
  if (!c.out.empty()) write_text(sibling_csv(c.out), csv.str());
  return kOk;
}

inline int cmd_explog(const Common& c, bool verify, double tolerance, std::ostream& out,
                      std::ostream& err) {
  LoadOptions opts;
  opts.normalize_weights = c.normalize_weights;
  const FieldPair p = load_pair(c.file, c.field0, c.field1, opts, err);
  const MetricField& f0 = *p.f0;
  const MetricField& f1 = *p.f1;
  const SampleGrid& grid = *f0.grid();
  const FieldClassification cls = classify_fields(f0, f1);
  if (cls.mask_P.size() != grid.size()) {
    std::string ids;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (cls.cases[i].tag != CaseTag::Riemannian) ids += (ids.empty() ? "" : ", ") + grid[i].id;
    err << "error: no Riemannian geodesic at samples: " << ids << "\n";
    return kDomainError;
  }

  json samples = json::array();
  std::ostringstream csv;
  csv << "id,distance,tangent_norm,norm_gap,reconstruction_error\n";
  double max_recon = 0.0, max_gap = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SpdTensor& a0 = f0[i].tensor();
    const SymTensor psi = inv_exp(a0, f1[i].tensor());
    const double norm = std::sqrt(fiber_inner(a0, psi, psi));
    const double d = fiber_distance(f0[i], f1[i]);
    const double gap = std::abs(norm - d);
    const double recon = metgeo::detail::relative_entry_error(exp_map(a0, psi, 1.0), f1[i]);
    max_recon = std::max(max_recon, recon);
    max_gap = std::max(max_gap, gap);
    json row{{"id", grid[i].id}, {"psi", tensor_json(psi)}, {"norm", norm}, {"distance", d}, {"norm_gap", gap}};
    if (verify) row["reconstruction_error"] = recon;
    samples.push_back(std::move(row));
    csv << grid[i].id << "," << full(d) << "," << full(norm) << "," << full(gap) << "," << full(recon) << "\n";
  }
  json report{{"samples", std::move(samples)}, {"max_norm_gap", max_gap}};
  if (verify) report["max_reconstruction_error"] = max_recon;
  emit(out, c.out, c.format == "csv" ? csv.str() : dump(report));
  if (verify) {
    err << "max reconstruction error " << full(max_recon) << "\n";
    if (!(max_recon <= tolerance)) {
      err << "error: reconstruction error exceeds " << full(tolerance) << "\n";
      return kVerificationFailed;
    }
  }
  return kOk;
}


// ---------------------------------------------------------------------------
// check

struct CheckOptions {
  std::string mode, out, format, pairs, emit_corpus;
  std::size_t trials = 0;  // 0: per-mode default
  std::uint64_t seed = 7;
  double tolerance = -1.0;  // negative: per-mode default
  bool include_cone = false;
  std::size_t t_samples = 65;
  OracleConfig oracle;
};

inline json point_pair_json(const OraclePair& p) {
  return json{{"dim", p.p0.dim()}, {"p0", point_json(p.p0)}, {"p1", point_json(p.p1)}};
}

/// {"pairs": [{"dim": n, "p0": point, "p1": point}, ...]}
inline std::vector<OraclePair> load_pairs(const std::string& path, std::ostream& err) {
  const json j = read_json(path);
  if (!j.is_object() || !j.contains("pairs") || !j.at("pairs").is_array())
    metgeo::detail::fail(ErrorKind::InvalidInput, path + ": expected {\"pairs\": [...]}");
  std::vector<OraclePair> out;
  std::vector<std::string> warnings;
  const LoadOptions opts;
  std::size_t k = 0;
  for (const auto& e : j.at("pairs")) {
    const std::string where = "pairs[" + std::to_string(k++) + "]";
    if (!e.is_object() || !e.contains("dim") || !e.at("dim").is_number_integer() || e.at("dim").get<long>() < 1 ||
        !e.contains("p0") || !e.contains("p1"))
      metgeo::detail::fail(ErrorKind::InvalidInput, where + ": needs \"dim\", \"p0\" and \"p1\"");
    const auto n = static_cast<std::size_t>(e.at("dim").get<long>());
    out.push_back({parse_point(e.at("p0"), n, where + ".p0", opts, warnings),
                   parse_point(e.at("p1"), n, where + ".p1", opts, warnings)});
  }
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  return out;
}

inline json shapes_json(const Cat0Report& r) {
  json j = json::object();
  for (TriangleShape s : kAllTriangleShapes) j[std::string(to_string(s))] = r.count(s);
  return j;
}

inline json cat0_json(const Cat0Report& r) {
  json j{{"seed", r.seed},
         {"trials", r.trials},
         {"max_violation", r.max_violation},
         {"max_side_violation", r.max_side_violation},
         {"shapes", shapes_json(r)}};
  if (r.worst_case) {
    const Cat0Case& w = *r.worst_case;
    json worst{{"trial", w.trial}, {"s", w.s}, {"t", w.t}};
    if (!w.vertices.empty()) {
      json v = json::array();
      for (const auto& p : w.vertices) v.push_back(point_json(p));
      worst["vertices"] = std::move(v);
    }
    j["worst_case"] = std::move(worst);
  }
  return j;
}

inline std::size_t pick(std::size_t given, std::size_t fallback) { return given ? given : fallback; }
inline double pick(double given, double fallback) { return given >= 0.0 ? given : fallback; }

inline int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err) {
  const unsigned threads = default_thread_count();
  if (!o.emit_corpus.empty() && o.mode != "oracle")
    metgeo::detail::fail(ErrorKind::InvalidInput, "--emit-corpus applies to check oracle only");
  json report{{"mode", o.mode}, {"seed", o.seed}, {"threads", threads}};
  bool passed = false;
  std::ostringstream summary;

  if (o.mode == "bounds") {
    const double tol = pick(o.tolerance, 1e-10);
    const BoundsReport r = bounds_sweep(pick(o.trials, 10000), o.seed, threads);
    passed = r.passed(tol, 1e-12);
    report.update({{"trials", r.trials},
                   {"tolerance", tol},
                   {"min_lower_slack", r.min_lower_slack},
                   {"min_upper_slack", r.min_upper_slack},
                   {"max_conformal_gap", r.max_conformal_gap},
                   {"max_cone_gap", r.max_cone_gap},
                   {"conformal_pairs", r.conformal_pairs},
                   {"cone_pairs", r.cone_pairs}});
    summary << "bounds: " << r.trials << " pairs, min slack "
            << full(std::min(r.min_lower_slack, r.min_upper_slack)) << ", equality gap "
            << full(std::max(r.max_conformal_gap, r.max_cone_gap));
  } else if (o.mode == "cat0") {
    const double tol = pick(o.tolerance, 1e-9);
    Cat0SweepConfig fc;
    fc.trials = pick(o.trials, 1000);
    fc.seed = o.seed;
    fc.include_cone = o.include_cone;
    fc.threads = threads;
    FieldCat0SweepConfig gc;
    gc.trials = std::max<std::size_t>(1, fc.trials / 10);
    gc.seed = o.seed;
    gc.include_cone = o.include_cone;
    gc.threads = threads;
    const Cat0Report fr = cat0_sweep(fc);
    const Cat0Report gr = field_cat0_sweep(gc);
    passed = fr.passed(tol) && gr.passed(tol);
    json field = cat0_json(gr);
    field["max_planar_per_sample_gap"] = gr.max_planar_per_sample_gap;
    report.update({{"tolerance", tol},
                   {"include_cone", o.include_cone},
                   {"max_violation", std::max(fr.max_violation, gr.max_violation)},
                   {"fiber", cat0_json(fr)},
                   {"field", std::move(field)}});
    summary << "cat0: " << fr.trials << " fiber and " << gr.trials << " field triangles, max_violation "
            << full(std::max(fr.max_violation, gr.max_violation));
  } else if (o.mode == "oracle") {
    const double tol = pick(o.tolerance, 0.03);
    o.oracle.validate();
    const std::vector<OraclePair> pairs =
        o.pairs.empty() ? oracle_corpus(o.seed, pick(o.trials, 50)) : load_pairs(o.pairs, err);
    if (!o.emit_corpus.empty()) {
      json out_pairs = json::array();
      for (const auto& p : pairs) out_pairs.push_back(point_pair_json(p));
      write_text(o.emit_corpus, dump(json{{"pairs", std::move(out_pairs)}}));
    }
    const OracleReport r = oracle_sweep(pairs, o.oracle, threads);
    passed = r.passed(tol, 1e-3);
    json rows = json::array();
    for (const OracleRow& row : r.rows)
      rows.push_back({{"closed_form", row.closed_form},
                      {"oracle", row.oracle},
                      {"relative", row.relative},
                      {"min_fourth_root_det", row.min_fourth_root_det},
                      {"case", std::string(to_string(row.tag))}});
    report.update({{"pairs", pairs.size()},
                   {"tolerance", tol},
                   {"max_relative_error", r.max_relative_error},
                   {"min_relative_error", r.min_relative_error},
                   {"seconds", r.seconds},
                   {"config",
                    {{"waypoints", o.oracle.waypoints},
                     {"quadrature_substeps", o.oracle.quadrature_substeps},
                     {"iterations", o.oracle.iterations},
                     {"restarts", o.oracle.restarts},
                     {"step_scale", o.oracle.step_scale},
                     {"seed", o.oracle.seed}}},
                   {"rows", std::move(rows)}});
    summary << "oracle: " << pairs.size() << " pairs, max relative error " << full(r.max_relative_error)
            << ", most negative " << full(r.min_relative_error);
  } else if (o.mode == "speed") {
    if (o.t_samples < 3) metgeo::detail::fail(ErrorKind::InvalidInput, "--t-samples must be at least 3");
    const GeodesicReport r = geodesic_sweep(pick(o.trials, 1000), o.seed, o.t_samples, threads);
    passed = r.passed();
    report.update({{"trials", r.trials},
                   {"t_samples", r.samples},
                   {"max_endpoint_error", r.max_endpoint_error},
                   {"max_speed_variation", r.max_speed_variation},
                   {"max_length_error_riemannian", r.max_length_error_riemannian},
                   {"max_length_error_cone", r.max_length_error_cone},
                   {"riemannian_pairs", r.riemannian_pairs},
                   {"cone_pairs", r.cone_pairs}});
    summary << "speed: " << r.trials << " geodesics, endpoint " << full(r.max_endpoint_error) << ", speed "
            << full(r.max_speed_variation) << ", length " << full(r.max_length_error_riemannian) << " / "
            << full(r.max_length_error_cone);
  }
  report["passed"] = passed;

  if (o.format == "json") {
    emit(out, o.out, dump(report));
  } else {
    out << (passed ? "PASS " : "FAIL ") << summary.str() << "\n";
    if (!o.out.empty()) write_text(o.out, dump(report));
  }
  return passed ? kOk : kVerificationFailed;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distances and minimal paths between Riemannian metrics"};
  app.require_subcommand(1);

  detail::Common dist_args, geo_args, explog_args;
  CLI::App* dist = app.add_subcommand("dist", "field distance and per-sample table");
  detail::add_common(dist, dist_args);

  std::size_t t_samples = 11;
  CLI::App* geo = app.add_subcommand("geodesic", "sample the minimal path between two fields");
  detail::add_common(geo, geo_args);
  geo->add_option("--t-samples", t_samples, "number of uniform times, endpoints included");

  bool verify = false;
  double explog_tol = 1e-8;
  CLI::App* explog = app.add_subcommand("explog", "tangent vectors of the inverse exponential map");
  detail::add_common(explog, explog_args);
  explog->add_flag("--verify", verify, "report the exp(log) reconstruction error");
  explog->add_option("--tolerance", explog_tol, "reconstruction tolerance for --verify");

  detail::CheckOptions chk;
  CLI::App* check = app.add_subcommand("check", "randomized verification sweeps");
  check->add_option("mode", chk.mode, "bounds, cat0, oracle or speed")
      ->required()
      ->check(CLI::IsMember({"bounds", "cat0", "oracle", "speed"}));
  check->add_option("--trials", chk.trials, "number of random cases");
  check->add_option("--seed", chk.seed, "random seed");
  check->add_option("--tolerance", chk.tolerance, "pass threshold");
  check->add_flag("--include-cone", chk.include_cone, "let triangles use the cone point and cone edges");
  check->add_option("--pairs", chk.pairs, "oracle pair file");
  check->add_option("--emit-corpus", chk.emit_corpus, "oracle: also write the pairs checked to this path");
  check->add_option("--t-samples", chk.t_samples, "samples per geodesic (speed)");
  check->add_option("--out", chk.out, "report path (JSON)");
  check->add_option("--format", chk.format, "json prints the report")->check(CLI::IsMember({"json"}));
  check->add_option("--waypoints", chk.oracle.waypoints, "oracle waypoints");
  check->add_option("--iterations", chk.oracle.iterations, "oracle moves per restart");
  check->add_option("--restarts", chk.oracle.restarts, "oracle restarts");
  check->add_option("--oracle-seed", chk.oracle.seed, "oracle search seed");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*dist) return detail::cmd_dist(dist_args, out, err);
    if (*geo) return detail::cmd_geodesic(geo_args, t_samples, out, err);
    if (*explog) return detail::cmd_explog(explog_args, verify, explog_tol, out, err);
    return detail::cmd_check(chk, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace metgeo::cli
