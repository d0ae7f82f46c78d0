#pragma once

// Seeded property sweeps over random pairs and fields. Every trial derives
// its generator from (seed, trial), so reports are reproducible for any
// thread count.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "metgeo/fiber_geodesics.hpp"
#include "metgeo/field_space.hpp"
#include "metgeo/parallel.hpp"
#include "metgeo/random.hpp"
#include "metgeo/verification/oracle.hpp"

namespace metgeo {

namespace detail {

inline constexpr std::array<random::PairKind, 5> kAllPairKinds{
    random::PairKind::Riemannian, random::PairKind::Cone, random::PairKind::Conformal,
    random::PairKind::NearDegenerate, random::PairKind::ConeEndpoint};

inline std::size_t dim_for(std::size_t trial) { return 2 + (trial / kAllPairKinds.size()) % 2; }

/// max |x_ij - y_ij| / max(1, max |y_ij|); zero when both are the cone point.
inline double relative_entry_error(const FiberPoint& x, const FiberPoint& y) {
  if (x.is_cone() || y.is_cone()) return x.is_cone() == y.is_cone() ? 0.0 : 1.0;
  const SymTensor diff = x.tensor().tensor() - y.tensor().tensor();
  return diff.max_abs() / std::max(1.0, y.tensor().tensor().max_abs());
}

inline double relative_gap(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

template <typename T, typename Fn>
std::vector<T> run_trials(std::size_t trials, unsigned threads, Fn&& fn) {
  std::vector<std::optional<T>> slots(trials);
  parallel_for(trials, threads, [&](std::size_t i) { slots[i] = fn(i); });
  std::vector<T> out;
  out.reserve(trials);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Distance bounds

struct BoundsReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double min_lower_slack = std::numeric_limits<double>::infinity();  // d - lower
  double min_upper_slack = std::numeric_limits<double>::infinity();  // upper - d
  double max_conformal_gap = 0.0;  // |d - lower| / d on conformal pairs
  double max_cone_gap = 0.0;       // |upper - d| / d on cone-case pairs
  std::size_t conformal_pairs = 0;
  std::size_t cone_pairs = 0;

  bool passed(double slack_tol = 1e-10, double equality_tol = 1e-12) const {
    return min_lower_slack >= -slack_tol && min_upper_slack >= -slack_tol &&
           max_conformal_gap <= equality_tol && max_cone_gap <= equality_tol;
  }
};

/// (4/sqrt n) |x - y|  <=  d  <=  (4/sqrt n)(x + y), with x, y the fourth
/// roots of the determinants (zero at the cone point).
inline std::pair<double, double> distance_bounds(const FiberPoint& p0, const FiberPoint& p1) {
  const double scale = 4.0 / std::sqrt(static_cast<double>(p0.dim()));
  const double x = p0.is_cone() ? 0.0 : fourth_root_det(p0.tensor());
  const double y = p1.is_cone() ? 0.0 : fourth_root_det(p1.tensor());
  return {scale * std::abs(x - y), scale * (x + y)};
}

inline BoundsReport bounds_sweep(std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  detail::require(trials >= 1, ErrorKind::InvalidInput, "trials must be at least 1");
  struct Row {
    random::PairKind kind;
    CaseTag tag;
    double d, lower, upper;
  };
  const auto rows = detail::run_trials<Row>(trials, threads, [&](std::size_t trial) {
    random::Engine g = random::trial_engine(seed, trial, 3);
    const auto kind = detail::kAllPairKinds[trial % detail::kAllPairKinds.size()];
    const random::Pair p = random::pair(g, detail::dim_for(trial), kind);
    const auto [lo, hi] = distance_bounds(p.p0, p.p1);
    return Row{kind, classify(p.p0, p.p1).tag, fiber_distance(p.p0, p.p1), lo, hi};
  });
  BoundsReport r;
  r.seed = seed;
  r.trials = trials;
  for (const Row& row : rows) {
    r.min_lower_slack = std::min(r.min_lower_slack, row.d - row.lower);
    r.min_upper_slack = std::min(r.min_upper_slack, row.upper - row.d);
    if (row.kind == random::PairKind::Conformal) {
      ++r.conformal_pairs;
      r.max_conformal_gap = std::max(r.max_conformal_gap, detail::relative_gap(row.lower, row.d));
    }
    if (row.tag == CaseTag::ConeConcatenation) {
      ++r.cone_pairs;
      r.max_cone_gap = std::max(r.max_cone_gap, detail::relative_gap(row.upper, row.d));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Minimal-path contract: endpoints, constant speed, sampled length

struct GeodesicReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t samples = 0;
  double max_endpoint_error = 0.0;
  double max_speed_variation = 0.0;  // max |rate - mean| / mean over segments
  double max_length_error_riemannian = 0.0;
  double max_length_error_cone = 0.0;
  std::size_t riemannian_pairs = 0;
  std::size_t cone_pairs = 0;  // every other case

  bool passed() const {
    return max_endpoint_error <= 1e-9 && max_speed_variation <= 1e-4 &&
           max_length_error_riemannian <= 1e-6 && max_length_error_cone <= 1e-3;
  }
};

inline GeodesicReport geodesic_sweep(std::size_t trials, std::uint64_t seed, std::size_t samples = 65,
                                     unsigned threads = 1) {
  struct Row {
    bool riemannian;
    double endpoint, speed, length;
  };
  const auto rows = detail::run_trials<Row>(trials, threads, [&](std::size_t trial) {
    random::Engine g = random::trial_engine(seed, trial, 4);
    const auto kind = detail::kAllPairKinds[trial % detail::kAllPairKinds.size()];
    const random::Pair p = random::pair(g, detail::dim_for(trial), kind);
    Row row{classify(p.p0, p.p1).tag == CaseTag::Riemannian, 0.0, 0.0, 0.0};
    // at and just inside the endpoints; entrywise, or by distance when
    // the endpoint is the cone point
    const double scale = std::max(1.0, fiber_distance(p.p0, p.p1));
    auto error = [&](double t, const FiberPoint& end) {
      const FiberPoint at = fiber_geodesic(p.p0, p.p1, t);
      if (end.is_cone() != at.is_cone()) return fiber_distance(at, end) / scale;
      return detail::relative_entry_error(at, end);
    };
    row.endpoint = std::max({error(0.0, p.p0), error(1.0, p.p1), error(1e-12, p.p0),
                             error(1.0 - 1e-12, p.p1)});
    const SampledPath path =
        SampledPath::uniform(samples, [&](double t) { return fiber_geodesic(p.p0, p.p1, t); });
    const std::vector<double> rates = detail::segment_rates(path.times(), path.points());
    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(rates.size());
    for (double r : rates) row.speed = std::max(row.speed, detail::relative_gap(r, mean));
    row.length = detail::relative_gap(path_length(path), fiber_distance(p.p0, p.p1));
    return row;
  });
  GeodesicReport r;
  r.seed = seed;
  r.trials = trials;
  r.samples = samples;
  for (const Row& row : rows) {
    r.max_endpoint_error = std::max(r.max_endpoint_error, row.endpoint);
    r.max_speed_variation = std::max(r.max_speed_variation, row.speed);
    if (row.riemannian) {
      ++r.riemannian_pairs;
      r.max_length_error_riemannian = std::max(r.max_length_error_riemannian, row.length);
    } else {
      ++r.cone_pairs;
      r.max_length_error_cone = std::max(r.max_length_error_cone, row.length);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exponential map: round trip and volume law

struct ExpLogReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double max_reconstruction_error = 0.0;  // exp(inv_exp(a1)) vs a1, relative per entry
  double max_norm_gap = 0.0;              // | ||inv_exp||_{a0} - d | / d

  bool passed() const { return max_reconstruction_error <= 1e-8 && max_norm_gap <= 1e-10; }
};

inline ExpLogReport explog_sweep(std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  struct Row {
    double recon, norm;
  };
  const auto rows = detail::run_trials<Row>(trials, threads, [&](std::size_t trial) {
    random::Engine g = random::trial_engine(seed, trial, 5);
    const random::Pair p = random::pair(g, detail::dim_for(trial), random::PairKind::Riemannian);
    const SpdTensor& a0 = p.p0.tensor();
    const SymTensor h = inv_exp(a0, p.p1.tensor());
    const FiberPoint back = exp_map(a0, h, 1.0);
    const double norm = std::sqrt(fiber_inner(a0, h, h));
    return Row{detail::relative_entry_error(back, p.p1),
               detail::relative_gap(norm, fiber_distance(p.p0, p.p1))};
  });
  ExpLogReport r;
  r.seed = seed;
  r.trials = trials;
  for (const Row& row : rows) {
    r.max_reconstruction_error = std::max(r.max_reconstruction_error, row.recon);
    r.max_norm_gap = std::max(r.max_norm_gap, row.norm);
  }
  return r;
}

struct VolumeReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t times = 0;
  double max_relative_error = 0.0;

  bool passed() const { return max_relative_error < 1e-10; }
};

/// Along exp_map(a0, b, t) the fourth root of det equals
/// sqrt(q^2 + r^2) times that of a0. Tangents come from random Riemannian
/// pairs, so t in [0,1] stays inside the domain.
inline VolumeReport volume_sweep(std::size_t trials, std::uint64_t seed, std::size_t times = 64,
                                 unsigned threads = 1) {
  const auto rows = detail::run_trials<double>(trials, threads, [&](std::size_t trial) {
    random::Engine g = random::trial_engine(seed, trial, 6);
    const random::Pair p = random::pair(g, detail::dim_for(trial), random::PairKind::Riemannian);
    const SpdTensor& a0 = p.p0.tensor();
    const SymTensor b = inv_exp(a0, p.p1.tensor());
    const double base = fourth_root_det(a0);
    double worst = 0.0;
    for (std::size_t j = 0; j < times; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(times - 1);
      const FiberPoint at = exp_map(a0, b, t);
      const double expected = std::sqrt(exp_volume_factor(a0, b, t)) * base;
      const double got = at.is_cone() ? 0.0 : fourth_root_det(at.tensor());
      worst = std::max(worst, detail::relative_gap(got, expected));
    }
    return worst;
  });
  VolumeReport r;
  r.seed = seed;
  r.trials = trials;
  r.times = times;
  for (double w : rows) r.max_relative_error = std::max(r.max_relative_error, w);
  return r;
}

// ---------------------------------------------------------------------------
// Continuity across the exp-image threshold and in the endpoints

struct ThresholdReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double offset = 0.0;
  double max_jump = 0.0;  // |d(thr + offset) - d(thr - offset)|
  bool classes_straddle = true;

  bool passed() const { return max_jump < 1e-6 && classes_straddle; }
};

inline ThresholdReport threshold_sweep(std::size_t trials, std::uint64_t seed, double offset = 1e-8,
                                       unsigned threads = 1) {
  struct Row {
    double jump;
    bool straddle;
  };
  const auto rows = detail::run_trials<Row>(trials, threads, [&](std::size_t trial) {
    random::Engine g = random::trial_engine(seed, trial, 7);
    const std::size_t n = detail::dim_for(trial);
    const double thr = exp_image_threshold(n);
    const SpdTensor a0 = random::spd(g, n);
    const SymTensor dir = random::traceless_direction(g, n);
    const double trace = random::normal(g);
    const FiberPoint p0 = FiberPoint::spd(a0);
    const FiberPoint below = FiberPoint::spd(random::along(a0, trace, thr - offset, dir));
    const FiberPoint above = FiberPoint::spd(random::along(a0, trace, thr + offset, dir));
    return Row{std::abs(fiber_distance(p0, above) - fiber_distance(p0, below)),
               classify(p0, below).tag == CaseTag::Riemannian &&
                   classify(p0, above).tag == CaseTag::ConeConcatenation};
  });
  ThresholdReport r;
  r.seed = seed;
  r.trials = trials;
  r.offset = offset;
  for (const Row& row : rows) {
    r.max_jump = std::max(r.max_jump, row.jump);
    r.classes_straddle = r.classes_straddle && row.straddle;
  }
  return r;
}

enum class ContinuityRegime { ToCone, Riemannian, Cone, Threshold };

inline constexpr std::array<ContinuityRegime, 4> kAllContinuityRegimes{
    ContinuityRegime::ToCone, ContinuityRegime::Riemannian, ContinuityRegime::Cone,
    ContinuityRegime::Threshold};

inline std::string_view to_string(ContinuityRegime r) {
  switch (r) {
    case ContinuityRegime::ToCone: return "to_cone";
    case ContinuityRegime::Riemannian: return "riemannian";
    case ContinuityRegime::Cone: return "cone";
    case ContinuityRegime::Threshold: return "threshold";
  }
  return "unknown";
}

struct ContinuityRow {
  ContinuityRegime regime;
  double perturbation = 0.0;         // requested d(a_k, a1)
  double max_perturbation = 0.0;     // largest realised d(a_k, a1)
  double max_deviation = 0.0;        // sup_t d(gamma_k(t), gamma(t)), max over trials
  std::size_t crossings = 0;         // threshold regime: trials whose case differs from the limit's
};

struct ContinuityReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<ContinuityRow> rows;

  /// Deviation bound for a perturbation size: 1e-1 at 1e-3, 1e-3 at 1e-6.
  static double bound_for(double perturbation) { return perturbation >= 1e-4 ? 1e-1 : 1e-3; }
  bool passed() const {
    for (const auto& r : rows)
      if (!(r.max_deviation <= bound_for(r.perturbation))) return false;
    return true;
  }
};

namespace detail {

/// sup over a fine t grid (plus both switch times) of d(gamma_k(t), gamma(t)).
inline double geodesic_deviation(const FiberPoint& a0, const FiberPoint& a1, const FiberPoint& ak) {
  std::vector<double> ts;
  for (int j = 0; j <= 256; ++j) ts.push_back(j / 256.0);
  for (const FiberPoint* end : {&a1, &ak}) {
    const GeodesicCase c = classify(a0, *end);
    if (c.switch_time && *c.switch_time > 0.0 && *c.switch_time < 1.0) ts.push_back(*c.switch_time);
  }
  double worst = 0.0;
  for (double t : ts)
    worst = std::max(worst, fiber_distance(fiber_geodesic(a0, a1, t), fiber_geodesic(a0, ak, t)));
  return worst;
}

/// a1^{1/2} exp(eta E) a1^{1/2} with eta tuned by one secant step so that
/// d(a_k, a1) is close to eps.
inline FiberPoint perturb(random::Engine& g, const SpdTensor& a1, double eps) {
  const std::size_t n = a1.dim();
  SymTensor e = random::symmetric(g, n);
  e *= 1.0 / std::sqrt(e.frobenius_sq());
  const SpdTensor root = spd_sqrt(a1);
  auto make = [&](double eta) {
    return FiberPoint::spd(SpdTensor::trusted(congruence(root.tensor().matrix(), sym_exp(eta * e).tensor())));
  };
  const FiberPoint first = make(eps);
  const double d = fiber_distance(first, FiberPoint::spd(a1));
  return d > 0.0 ? make(eps * eps / d) : first;
}

}  // namespace detail

/// For each regime the limit geodesic runs from a0 to a1 and the perturbed
/// ones from a0 to a_k with d(a_k, a1) about eps. The threshold regime puts
/// a1 exactly on the exp-image boundary and alternates a_k between the
/// Riemannian side and the cone side.
inline ContinuityReport continuity_sweep(std::size_t trials, std::uint64_t seed,
                                         std::vector<double> perturbations = {1e-3, 1e-6},
                                         unsigned threads = 1) {
  struct Row {
    double realised, deviation;
    bool crossed;
  };
  ContinuityReport report;
  report.seed = seed;
  report.trials = trials;
  for (ContinuityRegime regime : kAllContinuityRegimes) {
    for (double eps : perturbations) {
      const auto rows = detail::run_trials<Row>(trials, threads, [&](std::size_t trial) {
        random::Engine g = random::trial_engine(seed, trial, 8 + static_cast<std::uint64_t>(regime));
        const std::size_t n = detail::dim_for(trial);
        const double thr = exp_image_threshold(n);
        const double scale = 4.0 / std::sqrt(static_cast<double>(n));
        const SpdTensor base = random::spd(g, n);
        const FiberPoint a0 = FiberPoint::spd(base);
        const SymTensor dir = random::traceless_direction(g, n);
        const double trace = random::normal(g);
        FiberPoint a1 = a0, ak = a0;
        switch (regime) {
          case ContinuityRegime::ToCone: {
            // a_k -> [0] along tensors whose case relative to a0 alternates
            a1 = FiberPoint::cone(n);
            const double frac = trial % 2 == 0 ? 0.5 : 1.5;
            const SpdTensor shape = random::along(base, trace, frac * thr, dir);
            const double q = fourth_root_det(shape);
            const double lambda = std::pow(eps / (scale * q), 4.0 / static_cast<double>(n));
            ak = FiberPoint::spd(shape.scaled(lambda));
            break;
          }
          case ContinuityRegime::Riemannian:
          case ContinuityRegime::Cone: {
            const double frac = regime == ContinuityRegime::Riemannian ? 0.6 : 1.2;
            const SpdTensor target = random::along(base, trace, frac * thr, dir);
            a1 = FiberPoint::spd(target);
            ak = detail::perturb(g, target, eps);
            break;
          }
          case ContinuityRegime::Threshold: {
            const SpdTensor target = random::along(base, trace, thr, dir);
            a1 = FiberPoint::spd(target);
            const double sign = trial % 2 == 0 ? -1.0 : 1.0;
            // move the traceless norm; d(a_k, a1) is first order in the shift
            auto at = [&](double shift) {
              const double root = std::sqrt(thr) + sign * shift;
              return FiberPoint::spd(random::along(base, trace, root * root, dir));
            };
            const FiberPoint first = at(eps);
            const double d = fiber_distance(first, a1);
            ak = d > 0.0 ? at(eps * eps / d) : first;
            break;
          }
        }
        const bool crossed = classify(a0, ak).tag != classify(a0, a1).tag;
        return Row{fiber_distance(ak, a1), detail::geodesic_deviation(a0, a1, ak), crossed};
      });
      ContinuityRow out{regime, eps, 0.0, 0.0, 0};
      for (const Row& r : rows) {
        out.max_perturbation = std::max(out.max_perturbation, r.realised);
        out.max_deviation = std::max(out.max_deviation, r.deviation);
        out.crossings += r.crossed;
      }
      report.rows.push_back(out);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Oracle corpus

struct OraclePair {
  FiberPoint p0;
  FiberPoint p1;
};

/// 50 pairs by default, alternating n = 2 and 3: Riemannian, cone-case,
/// conformal and cone-endpoint pairs in the ratio 2:2:1:1 (rounded).
inline std::vector<OraclePair> oracle_corpus(std::uint64_t seed, std::size_t count = 50) {
  static constexpr std::array<random::PairKind, 6> cycle{
      random::PairKind::Riemannian, random::PairKind::Cone,      random::PairKind::Riemannian,
      random::PairKind::Cone,       random::PairKind::Conformal, random::PairKind::ConeEndpoint};
  std::vector<OraclePair> out;
  for (std::size_t i = 0; i < count; ++i) {
    random::Engine g = random::trial_engine(seed, i, 9);
    random::Pair p = random::pair(g, 2 + i % 2, cycle[i % cycle.size()]);
    out.push_back({std::move(p.p0), std::move(p.p1)});
  }
  return out;
}

struct OracleRow {
  double closed_form = 0.0;
  double oracle = 0.0;
  double relative = 0.0;  // (oracle - closed_form) / closed_form
  double min_fourth_root_det = 0.0;
  CaseTag tag = CaseTag::Riemannian;
};

struct OracleReport {
  OracleConfig config;
  std::vector<OracleRow> rows;
  double max_relative_error = 0.0;
  double min_relative_error = 0.0;  // most negative: oracle below the closed form
  double seconds = 0.0;

  bool passed(double agreement = 0.03, double undercut = 1e-3) const {
    return max_relative_error <= agreement && min_relative_error >= -undercut;
  }
};

inline OracleReport oracle_sweep(const std::vector<OraclePair>& pairs, const OracleConfig& cfg,
                                 unsigned threads = 1) {
  const auto start = std::chrono::steady_clock::now();
  OracleReport r;
  r.config = cfg;
  r.rows = detail::run_trials<OracleRow>(pairs.size(), threads, [&](std::size_t i) {
    const OraclePair& p = pairs[i];
    OracleRow row;
    row.closed_form = fiber_distance(p.p0, p.p1);
    row.tag = classify(p.p0, p.p1).tag;
    if (p.p0.is_cone() && p.p1.is_cone()) return row;
    const OracleResult res = brute_force_path(p.p0, p.p1, cfg);
    row.oracle = res.length;
    row.min_fourth_root_det = res.min_fourth_root_det;
    row.relative = row.closed_form > 0.0 ? (row.oracle - row.closed_form) / row.closed_form : row.oracle;
    return row;
  });
  for (const OracleRow& row : r.rows) {
    r.max_relative_error = std::max(r.max_relative_error, std::abs(row.relative));
    r.min_relative_error = std::min(r.min_relative_error, row.relative);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---------------------------------------------------------------------------
// Field level: path lengths versus the distance formula

namespace detail {

/// Random field on `grid`: per sample, a random tensor, with the cone point
/// mixed in at a few samples.
inline MetricField random_field(random::Engine& g, const GridPtr& grid, double cone_fraction = 0.1) {
  std::vector<FiberPoint> values;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    if (random::uniform(g) < cone_fraction) {
      values.push_back(FiberPoint::cone(grid->dim()));
    } else {
      values.push_back(FiberPoint::spd(random::spd(g, grid->dim(), 0.8)));
    }
  }
  return MetricField(grid, std::move(values));
}

inline GridPtr random_grid(random::Engine& g, std::size_t samples, std::size_t dim) {
  std::vector<Sample> s;
  for (std::size_t i = 0; i < samples; ++i)
    s.push_back({"x" + std::to_string(i), random::uniform(g, 0.2, 1.0)});
  return SampleGrid::make(std::move(s), dim, true);
}

}  // namespace detail

struct FieldLengthReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double max_geodesic_length_error = 0.0;  // |L(field geodesic) - d| / d at 65 samples
  double min_inequality_slack = std::numeric_limits<double>::infinity();  // L^2 - sum w L_i^2

  bool passed() const { return max_geodesic_length_error <= 1e-3 && min_inequality_slack >= -1e-9; }
};

/// Random field pairs on 16-sample grids: the sampled field geodesic has
/// length field_distance, and randomly bent paths between the same fields
/// satisfy L^2 >= sum_i w_i L_i^2.
inline FieldLengthReport field_length_sweep(std::size_t trials, std::uint64_t seed,
                                            std::size_t samples = 16, std::size_t t_samples = 65,
                                            unsigned threads = 1) {
  struct Row {
    double geodesic, slack;
  };
  const auto rows = detail::run_trials<Row>(trials, threads, [&](std::size_t trial) {
    random::Engine g = random::trial_engine(seed, trial, 10);
    const std::size_t n = 2 + trial % 2;
    const GridPtr grid = detail::random_grid(g, samples, n);
    const MetricField f0 = detail::random_field(g, grid);
    const MetricField f1 = detail::random_field(g, grid);
    const FieldPath geo = sample_field_geodesic(f0, f1, t_samples);
    const double d = field_distance(f0, f1);
    Row row{d > 0.0 ? detail::relative_gap(field_path_length(geo), d) : field_path_length(geo), 0.0};

    // bend the geodesic: conjugate interior samples by exp(bump(t) * X_i),
    // with nonuniform times
    std::vector<double> times{0.0};
    for (std::size_t j = 1; j + 1 < t_samples; ++j) times.push_back(random::uniform(g));
    times.push_back(1.0);
    std::sort(times.begin() + 1, times.end() - 1);
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<SymTensor> bends;
    for (std::size_t i = 0; i < samples; ++i) bends.push_back(random::symmetric(g, n, 0.3));
    FieldPath path;
    for (double t : times) {
      const MetricField on = field_geodesic(f0, f1, t);
      if (t == 0.0 || t == 1.0) {
        path.emplace_back(t, on);
        continue;
      }
      const double bump = std::sin(std::numbers::pi * t);
      std::vector<FiberPoint> values;
      for (std::size_t i = 0; i < samples; ++i) {
        if (on[i].is_cone()) {
          values.push_back(on[i]);
          continue;
        }
        const SpdTensor r = sym_exp((0.5 * bump) * bends[i]);
        values.push_back(FiberPoint::spd(
            SpdTensor::trusted(congruence(r.tensor().matrix(), on[i].tensor().tensor()))));
      }
      path.emplace_back(t, MetricField(grid, std::move(values)));
    }
    const double total = field_path_length(path);
    const std::vector<double> each = per_sample_path_lengths(path);
    double rhs = 0.0;
    for (std::size_t i = 0; i < samples; ++i) rhs += (*grid)[i].weight * each[i] * each[i];
    row.slack = total * total - rhs;
    return row;
  });
  FieldLengthReport r;
  r.seed = seed;
  r.trials = trials;
  for (const Row& row : rows) {
    r.max_geodesic_length_error = std::max(r.max_geodesic_length_error, row.geodesic);
    r.min_inequality_slack = std::min(r.min_inequality_slack, row.slack);
  }
  return r;
}

}  // namespace metgeo
