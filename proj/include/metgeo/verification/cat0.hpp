#pragma once

// Comparison-triangle checks of the CAT(0) inequality, for single fibers
// and for fields on a sample grid.

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metgeo/error.hpp"
#include "metgeo/fiber_geodesics.hpp"
#include "metgeo/field_space.hpp"
#include "metgeo/parallel.hpp"
#include "metgeo/random.hpp"

namespace metgeo {

/// Where the cone point sits relative to a triangle. The cone cases are
/// named from the point of view of the edges opposite or adjacent to it.
enum class TriangleShape {
  Riemannian,            // no cone point, every edge a Riemannian geodesic
  ThreeConeEdges,        // no cone vertex, every edge passes through the cone point
  TwoConeEdges,          // no cone vertex, one Riemannian edge
  OneConeEdge,           // no cone vertex, two Riemannian edges
  ConeVertexConeEdge,    // cone vertex, opposite edge through the cone point
  ConeVertexRiemannian,  // cone vertex, opposite edge Riemannian
  Degenerate,            // two or three cone vertices
};

inline constexpr std::array<TriangleShape, 7> kAllTriangleShapes{
    TriangleShape::Riemannian,         TriangleShape::ThreeConeEdges,
    TriangleShape::TwoConeEdges,       TriangleShape::OneConeEdge,
    TriangleShape::ConeVertexConeEdge, TriangleShape::ConeVertexRiemannian,
    TriangleShape::Degenerate};

inline std::string_view to_string(TriangleShape s) {
  switch (s) {
    case TriangleShape::Riemannian: return "riemannian";
    case TriangleShape::ThreeConeEdges: return "three_cone_edges";
    case TriangleShape::TwoConeEdges: return "two_cone_edges";
    case TriangleShape::OneConeEdge: return "one_cone_edge";
    case TriangleShape::ConeVertexConeEdge: return "cone_vertex_cone_edge";
    case TriangleShape::ConeVertexRiemannian: return "cone_vertex_riemannian_edge";
    case TriangleShape::Degenerate: return "degenerate";
  }
  return "unknown";
}

inline TriangleShape triangle_shape(const FiberPoint& a, const FiberPoint& b, const FiberPoint& c) {
  const int cones = int(a.is_cone()) + int(b.is_cone()) + int(c.is_cone());
  if (cones >= 2) return TriangleShape::Degenerate;
  if (cones == 1) {
    const FiberPoint& p = a.is_cone() ? b : a;
    const FiberPoint& q = c.is_cone() ? b : c;
    return classify(p, q).tag == CaseTag::Riemannian ? TriangleShape::ConeVertexRiemannian
                                                     : TriangleShape::ConeVertexConeEdge;
  }
  int cone_edges = 0;
  for (const auto& [p, q] : {std::pair{&a, &b}, std::pair{&b, &c}, std::pair{&c, &a}})
    cone_edges += classify(*p, *q).tag == CaseTag::ConeConcatenation;
  switch (cone_edges) {
    case 0: return TriangleShape::Riemannian;
    case 1: return TriangleShape::OneConeEdge;
    case 2: return TriangleShape::TwoConeEdges;
    default: return TriangleShape::ThreeConeEdges;
  }
}

namespace detail {

/// |s b - t c| for planar b, c with |b| = ab, |c| = ac, |b - c| = bc.
inline double comparison_distance(double ab, double ac, double bc, double s, double t) {
  const double sq = s * s * ab * ab + t * t * ac * ac - s * t * (ab * ab + ac * ac - bc * bc);
  return std::sqrt(std::max(0.0, sq));
}

/// Largest amount by which one side exceeds the sum of the other two.
inline double side_violation(double ab, double ac, double bc) {
  return std::max({ab - ac - bc, ac - ab - bc, bc - ab - ac});
}

}  // namespace detail

struct Cat0Slack {
  double comparison = 0.0;  // d(w1, w2) - |w1bar - w2bar|
  double sides = 0.0;       // positive if the side lengths break the triangle inequality
  double worst() const { return std::max(comparison, sides); }
};

/// w1 on [a,b] at s, w2 on [a,c] at t, compared against the same points on
/// a Euclidean triangle with equal side lengths.
inline Cat0Slack cat0_slack(const FiberPoint& a, const FiberPoint& b, const FiberPoint& c,
                            double s, double t) {
  detail::require(a.dim() == b.dim() && a.dim() == c.dim(), ErrorKind::InvalidInput,
                  "dimension mismatch");
  const double ab = fiber_distance(a, b);
  const double ac = fiber_distance(a, c);
  const double bc = fiber_distance(b, c);
  const FiberPoint w1 = fiber_geodesic(a, b, s);
  const FiberPoint w2 = fiber_geodesic(a, c, t);
  return {fiber_distance(w1, w2) - detail::comparison_distance(ab, ac, bc, s, t),
          detail::side_violation(ab, ac, bc)};
}

/// Positive values mean the CAT(0) inequality (or the triangle inequality
/// on the sides) fails by that much.
inline double cat0_check(const FiberPoint& a, const FiberPoint& b, const FiberPoint& c, double s,
                         double t) {
  return cat0_slack(a, b, c, s, t).worst();
}

struct FieldCat0Slack {
  double planar = 0.0;      // against a planar triangle with the field side lengths
  double per_sample = 0.0;  // against per-sample planar triangles, combined in L2
  double sides = 0.0;
  double worst() const { return std::max({planar, per_sample, sides}); }
};

inline FieldCat0Slack field_cat0_check(const MetricField& g, const MetricField& h,
                                       const MetricField& k, double s, double t) {
  detail::require(same_grid(g, h) && same_grid(g, k), ErrorKind::InvalidInput,
                  "fields live on different grids");
  const SampleGrid& grid = *g.grid();
  const std::vector<double> gh = pointwise_distances(g, h);
  const std::vector<double> gk = pointwise_distances(g, k);
  const std::vector<double> hk = pointwise_distances(h, k);
  const MetricField l1 = field_geodesic(g, h, s);
  const MetricField l2 = field_geodesic(g, k, t);
  const std::vector<double> ll = pointwise_distances(l1, l2);

  double sq_gh = 0.0, sq_gk = 0.0, sq_hk = 0.0, sq_ll = 0.0, sq_cmp = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid[i].weight;
    sq_gh += w * gh[i] * gh[i];
    sq_gk += w * gk[i] * gk[i];
    sq_hk += w * hk[i] * hk[i];
    sq_ll += w * ll[i] * ll[i];
    const double cmp = detail::comparison_distance(gh[i], gk[i], hk[i], s, t);
    sq_cmp += w * cmp * cmp;
  }
  const double d_gh = std::sqrt(sq_gh), d_gk = std::sqrt(sq_gk), d_hk = std::sqrt(sq_hk);
  const double d_ll = std::sqrt(sq_ll);
  return {d_ll - detail::comparison_distance(d_gh, d_gk, d_hk, s, t), d_ll - std::sqrt(sq_cmp),
          detail::side_violation(d_gh, d_gk, d_hk)};
}

// ---------------------------------------------------------------------------
// Sweeps

struct Cat0Case {
  std::vector<FiberPoint> vertices;  // fiber sweep: a, b, c
  std::vector<MetricField> fields;   // field sweep: g, h, k
  double s = 0.0;
  double t = 0.0;
  std::uint64_t trial = 0;
};

struct Cat0Report {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double max_violation = -std::numeric_limits<double>::infinity();  // max slack seen
  double max_side_violation = -std::numeric_limits<double>::infinity();
  double max_planar_per_sample_gap = 0.0;  // field sweeps only
  std::optional<Cat0Case> worst_case;
  std::array<std::size_t, kAllTriangleShapes.size()> shape_counts{};

  std::size_t count(TriangleShape s) const { return shape_counts[static_cast<std::size_t>(s)]; }
  bool passed(double tolerance) const {
    return std::isfinite(max_violation) && max_violation <= tolerance && max_side_violation <= tolerance;
  }
};

namespace detail {

/// Edge regime for generated triangles: well inside the exponential image,
/// close to its boundary on either side, or beyond it. Cone edges stay
/// below 1.25 times the threshold: farther out the vertices become so
/// ill-conditioned that rounding in their stored entries alone moves
/// distances by more than the CAT(0) tolerance.
inline double sample_traceless_fraction(random::Engine& g) {
  const double u = random::uniform(g);
  if (u < 0.35) return random::uniform(g, 0.0, 0.9);
  if (u < 0.5) return random::uniform(g, 0.9, 1.0);
  if (u < 0.65) return random::uniform(g, 1.0, 1.05);
  return random::uniform(g, 1.05, 1.25);
}

/// Vertices b, c are placed relative to a with independent edge regimes;
/// optionally one vertex is replaced by the cone point.
inline std::array<FiberPoint, 3> random_triangle(random::Engine& g, std::size_t n, bool include_cone) {
  const double thr = exp_image_threshold(n);
  const SpdTensor a = random::spd(g, n);
  SpdTensor other[2];
  for (auto& v : other) {
    const double trace = random::normal(g);
    const double tsq = sample_traceless_fraction(g) * thr;
    v = random::relative_to(g, a, trace, tsq);
  }
  const SpdTensor& b = other[0];
  const SpdTensor& c = other[1];
  std::array<FiberPoint, 3> v{FiberPoint::spd(a), FiberPoint::spd(b), FiberPoint::spd(c)};
  if (include_cone && random::uniform(g) < 0.3)
    v[static_cast<std::size_t>(random::uniform(g) * 3.0) % 3] = FiberPoint::cone(n);
  // rotate so the comparison base vertex varies
  std::rotate(v.begin(), v.begin() + static_cast<std::size_t>(random::uniform(g) * 3.0) % 3, v.end());
  return v;
}

/// Geodesic parameters, with endpoints and the middle drawn now and then.
inline double sample_parameter(random::Engine& g) {
  const double u = random::uniform(g);
  if (u < 0.05) return 0.0;
  if (u < 0.1) return 1.0;
  if (u < 0.15) return 0.5;
  return random::uniform(g);
}

}  // namespace detail

struct Cat0SweepConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 7;
  bool include_cone = true;
  std::size_t params_per_triangle = 4;  // (s,t) draws per triangle
  std::vector<std::size_t> dims{2, 3};
  unsigned threads = 1;
};

inline Cat0Report cat0_sweep(const Cat0SweepConfig& cfg) {
  struct Outcome {
    TriangleShape shape;
    Cat0Slack worst;
    double s, t;
    std::array<FiberPoint, 3> v;
  };
  std::vector<std::optional<Outcome>> out(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
    random::Engine g = random::trial_engine(cfg.seed, trial, 1);
    const std::size_t n = cfg.dims[trial % cfg.dims.size()];
    const auto v = detail::random_triangle(g, n, cfg.include_cone);
    Outcome o{triangle_shape(v[0], v[1], v[2]), {-1e300, -1e300}, 0.0, 0.0, v};
    for (std::size_t k = 0; k < cfg.params_per_triangle; ++k) {
      const double s = detail::sample_parameter(g);
      const double t = detail::sample_parameter(g);
      const Cat0Slack sl = cat0_slack(v[0], v[1], v[2], s, t);
      o.worst.sides = sl.sides;
      if (sl.comparison > o.worst.comparison) {
        o.worst.comparison = sl.comparison;
        o.s = s;
        o.t = t;
      }
    }
    out[trial] = std::move(o);
  });

  Cat0Report r;
  r.seed = cfg.seed;
  r.trials = cfg.trials;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Outcome& o = *out[i];
    ++r.shape_counts[static_cast<std::size_t>(o.shape)];
    r.max_side_violation = std::max(r.max_side_violation, o.worst.sides);
    if (o.worst.comparison > r.max_violation) {
      r.max_violation = o.worst.comparison;
      r.worst_case = Cat0Case{{o.v.begin(), o.v.end()}, {}, o.s, o.t, i};
    }
  }
  return r;
}

struct FieldCat0SweepConfig {
  std::size_t trials = 100;
  std::uint64_t seed = 7;
  std::size_t samples = 16;
  std::size_t dim = 2;
  bool include_cone = true;
  std::size_t params_per_triangle = 10;
  unsigned threads = 1;
};

/// Random grid weights (normalized) and per-sample random triangles. With
/// include_cone, every fifth trial has one vertex field equal to the cone
/// point at every sample. Shape counts tally per-sample triangles.
inline Cat0Report field_cat0_sweep(const FieldCat0SweepConfig& cfg) {
  struct Outcome {
    FieldCat0Slack worst;
    double s, t;
    std::vector<MetricField> fields;
    std::array<std::size_t, kAllTriangleShapes.size()> shapes{};
    double gap = 0.0;
  };
  std::vector<std::optional<Outcome>> out(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
    random::Engine g = random::trial_engine(cfg.seed, trial, 2);
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < cfg.samples; ++i)
      samples.push_back({"s" + std::to_string(i), random::uniform(g, 0.2, 1.0)});
    const GridPtr grid = SampleGrid::make(std::move(samples), cfg.dim, true);
    std::array<std::vector<FiberPoint>, 3> values;
    const bool cone_vertex = cfg.include_cone && trial % 5 == 4;
    Outcome o{{-1e300, -1e300, -1e300}, 0.0, 0.0, {}, {}, 0.0};
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      auto v = detail::random_triangle(g, cfg.dim, cfg.include_cone && !cone_vertex);
      if (cone_vertex) v[2] = FiberPoint::cone(cfg.dim);
      ++o.shapes[static_cast<std::size_t>(triangle_shape(v[0], v[1], v[2]))];
      for (std::size_t k = 0; k < 3; ++k) values[k].push_back(v[k]);
    }
    for (std::size_t k = 0; k < 3; ++k) o.fields.emplace_back(grid, values[k]);
    for (std::size_t k = 0; k < cfg.params_per_triangle; ++k) {
      const double s = detail::sample_parameter(g);
      const double t = detail::sample_parameter(g);
      const FieldCat0Slack sl = field_cat0_check(o.fields[0], o.fields[1], o.fields[2], s, t);
      o.worst.sides = std::max(o.worst.sides, sl.sides);
      o.worst.per_sample = std::max(o.worst.per_sample, sl.per_sample);
      o.gap = std::max(o.gap, std::abs(sl.planar - sl.per_sample));
      if (sl.planar > o.worst.planar) {
        o.worst.planar = sl.planar;
        o.s = s;
        o.t = t;
      }
    }
    out[trial] = std::move(o);
  });

  Cat0Report r;
  r.seed = cfg.seed;
  r.trials = cfg.trials;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Outcome& o = *out[i];
    for (std::size_t k = 0; k < o.shapes.size(); ++k) r.shape_counts[k] += o.shapes[k];
    r.max_side_violation = std::max(r.max_side_violation, o.worst.sides);
    r.max_planar_per_sample_gap = std::max(r.max_planar_per_sample_gap, o.gap);
    const double v = std::max(o.worst.planar, o.worst.per_sample);
    if (v > r.max_violation) {
      r.max_violation = v;
      r.worst_case = Cat0Case{{}, o.fields, o.s, o.t, i};
    }
  }
  return r;
}

}  // namespace metgeo
