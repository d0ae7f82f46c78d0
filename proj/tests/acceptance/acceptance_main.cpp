// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "metgeo/parallel.hpp"
#include "metgeo/verification.hpp"

using namespace metgeo;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool passed;
  std::string detail;
};

bool run(const char* name, double budget_seconds, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = check();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= budget_seconds;
  const bool ok = o.passed && in_time;
  std::printf("%s %-22s %s (%.1fs of %.0fs)\n", ok ? "PASS" : "FAIL", name, o.detail.c_str(), secs,
              budget_seconds);
  std::fflush(stdout);
  return ok;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

}  // namespace

int main() {
  const unsigned threads = default_thread_count();
  std::printf("seed %llu, %u threads\n", static_cast<unsigned long long>(kSeed), threads);
  bool all = true;

  all &= run("oracle", 300, [&] {
    const OracleReport r = oracle_sweep(oracle_corpus(kSeed, 50), OracleConfig{}, threads);
    std::size_t dims[4] = {};
    std::size_t cone = 0;
    for (const OracleRow& row : r.rows) cone += row.tag != CaseTag::Riemannian;
    for (const OraclePair& p : oracle_corpus(kSeed, 50)) ++dims[p.p0.dim()];
    return Outcome{r.passed(0.03, 1e-3) && r.rows.size() == 50 && dims[2] > 0 && dims[3] > 0 && cone > 0,
                   fmt("50 pairs (%zu cone-case), max rel error %.3g, most negative %.3g", cone,
                       r.max_relative_error, r.min_relative_error)};
  });

  all &= run("geodesic_contract", 60, [&] {
    const GeodesicReport r = geodesic_sweep(1000, kSeed, 65, threads);
    return Outcome{r.passed() && r.riemannian_pairs > 0 && r.cone_pairs > 0,
                   fmt("1000 pairs, endpoint %.3g, speed %.3g, length %.3g (riemannian) %.3g (cone)",
                       r.max_endpoint_error, r.max_speed_variation, r.max_length_error_riemannian,
                       r.max_length_error_cone)};
  });

  all &= run("exp_log_round_trip", 600, [&] {
    const ExpLogReport r = explog_sweep(1000, kSeed, threads);
    return Outcome{r.passed(), fmt("1000 pairs, reconstruction %.3g, norm gap %.3g", r.max_reconstruction_error,
                                   r.max_norm_gap)};
  });

  all &= run("volume_law", 600, [&] {
    const VolumeReport r = volume_sweep(100, kSeed, 64, threads);
    return Outcome{r.passed(), fmt("100 geodesics x 64 times, max rel deviation %.3g", r.max_relative_error)};
  });

  all &= run("distance_bounds", 600, [&] {
    const BoundsReport r = bounds_sweep(10000, kSeed, threads);
    return Outcome{r.passed(1e-10, 1e-12) && r.conformal_pairs > 0 && r.cone_pairs > 0,
                   fmt("10000 pairs, min slack %.3g, conformal gap %.3g (%zu), cone gap %.3g (%zu)",
                       std::min(r.min_lower_slack, r.min_upper_slack), r.max_conformal_gap, r.conformal_pairs,
                       r.max_cone_gap, r.cone_pairs)};
  });

  all &= run("threshold_continuity", 600, [&] {
    const ThresholdReport r = threshold_sweep(1000, kSeed, 1e-8, threads);
    return Outcome{r.passed(), fmt("1000 pairs at threshold +- 1e-8, max jump %.3g, cases straddle: %s",
                                   r.max_jump, r.classes_straddle ? "yes" : "no")};
  });

  all &= run("cat0", 300, [&] {
    Cat0SweepConfig fc;
    fc.trials = 1000;
    fc.seed = kSeed;
    fc.threads = threads;
    FieldCat0SweepConfig gc;
    gc.trials = 100;
    gc.samples = 16;
    gc.seed = kSeed;
    gc.threads = threads;
    const Cat0Report fr = cat0_sweep(fc);
    const Cat0Report gr = field_cat0_sweep(gc);
    std::size_t missing = 0;
    for (TriangleShape s : kAllTriangleShapes)
      if (s != TriangleShape::Degenerate && fr.count(s) == 0) ++missing;
    return Outcome{fr.passed(1e-9) && gr.passed(1e-9) && missing == 0,
                   fmt("1000 fiber + 100 field triangles, max violation %.3g / %.3g, shapes missing %zu",
                       fr.max_violation, gr.max_violation, missing)};
  });

  all &= run("field_coherence", 600, [&] {
    const FieldLengthReport r = field_length_sweep(100, kSeed, 16, 65, threads);
    // per-sample oracle paths assembled into field paths
    constexpr std::size_t kPairs = 6;
    std::vector<double> ratio(kPairs);
    parallel_for(kPairs, threads, [&](std::size_t i) {
      random::Engine g = random::trial_engine(kSeed, i, 11);
      const GridPtr grid = detail::random_grid(g, 4, 2 + i % 2);
      const MetricField f0 = detail::random_field(g, grid, 0.15);
      const MetricField f1 = detail::random_field(g, grid, 0.15);
      const double d = field_distance(f0, f1);
      ratio[i] = d > 0.0 ? brute_force_field_distance(f0, f1) / d : 1.0;
    });
    const double worst = *std::min_element(ratio.begin(), ratio.end());
    return Outcome{r.passed() && worst >= 0.98,
                   fmt("geodesic length error %.3g, min inequality slack %.3g, oracle/field distance >= %.4f",
                       r.max_geodesic_length_error, r.min_inequality_slack, worst)};
  });

  all &= run("endpoint_continuity", 600, [&] {
    const ContinuityReport r = continuity_sweep(50, kSeed, {1e-3, 1e-6}, threads);
    std::ostringstream s;
    std::size_t crossings = 0;
    for (const ContinuityRow& row : r.rows) {
      s << to_string(row.regime) << "@" << row.perturbation << ":" << fmt("%.2g", row.max_deviation) << " ";
      if (row.regime == ContinuityRegime::Threshold) crossings += row.crossings;
    }
    s << "threshold crossings " << crossings;
    return Outcome{r.passed() && crossings > 0, s.str()};
  });

  std::printf("%s\n", all ? "ALL PASS" : "SOME FAILED");
  return all ? 0 : 1;
}
