#pragma once

// Pointwise geometry of the fiber of positive-definite tensors at one point,
// together with its completion, in which every degenerate tensor is
// identified with a single cone point.
//
// Fiber metric:  <b,c>_a = tr(a^-1 b a^-1 c) * sqrt(det a).
//
// Between two positive-definite tensors a0, a1 write a1 = a0 exp(a0^-1 k).
// With k_T the a0-traceless part of k, the pair is joined by a Riemannian
// geodesic iff tr_{a0}(k_T^2) < (4 pi)^2 / n; otherwise the minimal path
// runs along two straight rays that meet at the cone point.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "metgeo/detail/finite_difference.hpp"
#include "metgeo/error.hpp"
#include "metgeo/spd_core.hpp"

namespace metgeo {

/// Element of the completed fiber: a positive-definite tensor or the cone point.
class FiberPoint {
 public:
  FiberPoint() = default;

  static FiberPoint cone(std::size_t n) { return FiberPoint(n, std::nullopt); }
  static FiberPoint spd(SpdTensor a) {
    const std::size_t n = a.dim();
    return FiberPoint(n, std::move(a));
  }

  bool is_cone() const noexcept { return !spd_.has_value(); }
  std::size_t dim() const noexcept { return n_; }

  const SpdTensor& tensor() const {
    if (!spd_) detail::fail(ErrorKind::InvalidInput, "the cone point carries no tensor");
    return *spd_;
  }

  /// The stored matrix, or the zero tensor for the cone point.
  SymTensor as_matrix() const { return spd_ ? spd_->tensor() : SymTensor(n_); }

 private:
  FiberPoint(std::size_t n, std::optional<SpdTensor> a) : n_(n), spd_(std::move(a)) {}
  std::size_t n_ = 0;
  std::optional<SpdTensor> spd_;
};

struct IngestedPoint {
  FiberPoint point;
  /// True when a nonzero semidefinite tensor was collapsed onto the cone point.
  bool collapsed = false;
};

/// Classifies a raw symmetric tensor: positive definite tensors are kept,
/// semidefinite ones (including zero) become the cone point, anything with a
/// clearly negative eigenvalue is rejected.
inline IngestedPoint ingest(const SymTensor& s, double tol = kDefaultPositivityTolerance) {
  const EigenSystem es = sym_eigen(s);
  const std::size_t n = s.dim();
  if (s.is_zero()) return {FiberPoint::cone(n), false};
  const double hi = es.eigenvalues.front();
  const double lo = es.eigenvalues.back();
  const double scale = std::max(std::abs(hi), std::abs(lo));
  if (lo < -tol * scale)
    detail::fail(ErrorKind::NotPositiveDefinite, "tensor has a negative eigenvalue");
  if (is_positive_definite(es, tol)) return {FiberPoint::spd(SpdTensor::trusted(s)), false};
  return {FiberPoint::cone(n), true};
}

enum class CaseTag { Riemannian, ConeConcatenation, FromCone, ToCone, BothCone };

inline std::string_view to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::Riemannian: return "riemannian";
    case CaseTag::ConeConcatenation: return "cone_concatenation";
    case CaseTag::FromCone: return "from_cone";
    case CaseTag::ToCone: return "to_cone";
    case CaseTag::BothCone: return "both_cone";
  }
  return "unknown";
}

struct GeodesicCase {
  CaseTag tag = CaseTag::BothCone;
  std::optional<SymTensor> log_coords;     // k with a1 = a0 exp(a0^-1 k)
  std::optional<double> traceless_norm_sq;  // tr_{a0}(k_T^2)
  std::optional<double> switch_time;        // cone crossing parameter
};

/// (4 pi)^2 / n: the exponential map at a0 reaches exactly the tensors
/// whose log coordinates have traceless a0-norm below this value.
inline double exp_image_threshold(std::size_t n) {
  const double four_pi = 4.0 * std::numbers::pi;
  return four_pi * four_pi / static_cast<double>(n);
}

/// Distance from a tensor to the cone point: (4/sqrt(n)) * fourth root of det.
inline double distance_to_cone(const SpdTensor& a) {
  return 4.0 / std::sqrt(static_cast<double>(a.dim())) * fourth_root_det(a);
}

namespace detail {

/// Frame in which a0 is the identity.
struct Whitening {
  Matrix sqrt;      // a0^{1/2}
  Matrix inv_sqrt;  // a0^{-1/2}
  double fourth_root_det = 0.0;

  explicit Whitening(const SpdTensor& a0) {
    const EigenSystem es = checked_eigen(a0);
    double log_det = 0.0;
    for (double l : es.eigenvalues) log_det += std::log(l);
    fourth_root_det = std::exp(0.25 * log_det);
    sqrt = apply_spectral(es, [](double l) { return std::sqrt(l); }).matrix();
    inv_sqrt = apply_spectral(es, [](double l) { return 1.0 / std::sqrt(l); }).matrix();
  }

  SymTensor whiten(const SymTensor& s) const { return congruence(inv_sqrt, s); }
  SymTensor unwhiten(const SymTensor& s) const { return congruence(sqrt, s); }
};

/// Log coordinates of a1 relative to a0, expressed in a0's whitened frame:
/// L = log(a0^{-1/2} a1 a0^{-1/2}), split into trace and traceless parts.
struct RelativeLog {
  SymTensor traceless;        // L_T
  double trace = 0.0;         // tr L = tr_{a0} k
  double traceless_sq = 0.0;  // tr(L_T^2) = tr_{a0}(k_T^2)
};

inline RelativeLog relative_log(const Whitening& w, const SpdTensor& a1) {
  const SymTensor m = w.whiten(a1.tensor());
  const EigenSystem es = sym_eigen(m);
  const double top = es.eigenvalues.front();
  if (!(top > 0.0) || !std::isfinite(top))
    fail(ErrorKind::NotPositiveDefinite, "endpoint is not positive definite");
  // Relative eigenvalues below about 1e-13 of the largest are lost to
  // rounding in the whitened frame. Any pair that far apart has
  // tr(L_T^2) well above the exp-image threshold for every n, so flooring
  // them keeps the classification exact while avoiding log of <= 0.
  const double floor = 1e-16 * top;
  const std::size_t n = m.dim();
  std::vector<double> logs(n);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    logs[i] = std::log(std::max(es.eigenvalues[i], floor));
    trace += logs[i];
  }
  const double mean = trace / static_cast<double>(n);
  double tsq = 0.0;
  for (double& l : logs) {
    l -= mean;
    tsq += l * l;
  }
  EigenSystem shifted{logs, es.frame};
  return {apply_spectral(shifted, [](double l) { return l; }), trace, tsq};
}

/// Geodesic from a0 with whitened initial velocity  trace/n * I + traceless,
/// where traceless_sq = tr(traceless^2).
inline FiberPoint exp_whitened(const SpdTensor& a0, const Whitening& w, double trace,
                               const SymTensor& traceless, double traceless_sq, double t) {
  const std::size_t n = a0.dim();
  const double nd = static_cast<double>(n);
  const double q = 1.0 + 0.25 * t * trace;
  if (traceless_sq == 0.0) {
    if (trace < 0.0) {
      const double t0 = -4.0 / trace;
      if (t > t0 * (1.0 + 1e-12))
        fail(ErrorKind::OutOfDomain, "pure-trace geodesic is only defined up to t0 = -4/tr b");
      if (t >= t0 || q <= 0.0) return FiberPoint::cone(n);
    }
    const double scale = std::pow(q, 4.0 / nd);
    if (!(scale > 0.0)) return FiberPoint::cone(n);
    return FiberPoint::spd(a0.scaled(scale));
  }
  const double root = std::sqrt(nd * traceless_sq);
  const double r = 0.25 * t * root;
  const double rho_sq = q * q + r * r;
  if (!(rho_sq > 1e-300)) return FiberPoint::cone(n);
  const double angle = std::atan2(r, q);  // in [0, pi) since r >= 0
  const double coeff = 4.0 / root * angle;
  EigenSystem es = sym_eigen(traceless);
  SymTensor rotation = apply_spectral(es, [coeff](double l) { return std::exp(coeff * l); });
  rotation *= std::pow(rho_sq, 2.0 / nd);
  return FiberPoint::spd(SpdTensor::trusted(w.unwhiten(rotation)));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Log coordinates and the exponential map

/// k with a1 = a0 exp(a0^-1 k).
inline SymTensor log_coords(const SpdTensor& a0, const SpdTensor& a1) {
  detail::require(a0.dim() == a1.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  const detail::Whitening w(a0);
  const SymTensor m = w.whiten(a1.tensor());
  const SymTensor log_m = spd_log(SpdTensor::trusted(m));
  return w.unwhiten(log_m);
}

/// a0 exp(a0^-1 k), the inverse of log_coords.
inline SpdTensor exp_coords(const SpdTensor& a0, const SymTensor& k) {
  detail::require(a0.dim() == k.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  const detail::Whitening w(a0);
  return SpdTensor::trusted(w.unwhiten(sym_exp(w.whiten(k)).tensor()));
}

/// Geodesic starting at a0 with initial velocity b, evaluated at t >= 0.
///
///   q(t) = 1 + t/4 tr_{a0} b,    r(t) = t/4 sqrt(n tr_{a0}(b_T^2))
///   a_t  = (q^2 + r^2)^{2/n} a0 exp(4 atan2(r,q) / sqrt(n tr_{a0}(b_T^2)) a0^-1 b_T)
///
/// For pure-trace b this reduces to q^{4/n} a0, which reaches the cone point
/// at t0 = -4 / tr_{a0} b when the trace is negative and is undefined beyond.
inline FiberPoint exp_map(const SpdTensor& a0, const SymTensor& b, double t) {
  detail::require(a0.dim() == b.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  detail::require(std::isfinite(t) && t >= 0.0, ErrorKind::InvalidInput,
                  "geodesic parameter must be a finite t >= 0");
  const detail::Whitening w(a0);
  const SymTensor bw = w.whiten(b);
  const double trace = bw.trace();
  SymTensor traceless = bw;
  for (std::size_t i = 0; i < b.dim(); ++i)
    traceless.set(i, i, bw(i, i) - trace / static_cast<double>(b.dim()));
  const double tsq = traceless.frobenius_sq();
  return detail::exp_whitened(a0, w, trace, traceless, tsq, t);
}

/// q(t)^2 + r(t)^2: the factor by which sqrt(det) grows along exp_map.
inline double exp_volume_factor(const SpdTensor& a0, const SymTensor& b, double t) {
  const TracelessSplit split = traceless_split(a0, b);
  const double n = static_cast<double>(a0.dim());
  const double q = 1.0 + 0.25 * t * split.trace;
  const double r = 0.25 * t * std::sqrt(n * trace_pair(a0, split.traceless, split.traceless));
  return q * q + r * r;
}

namespace detail {

struct TangentParts {
  double trace = 0.0;
  SymTensor traceless;  // whitened
  double traceless_sq = 0.0;
};

/// psi(k) in whitened coordinates, from the relative log of the endpoint.
inline TangentParts inverse_exp_parts(const RelativeLog& rl, std::size_t n) {
  const double nd = static_cast<double>(n);
  const double growth = std::exp(0.25 * rl.trace);
  const double angle = std::sqrt(nd * rl.traceless_sq) / 4.0;
  TangentParts out;
  out.trace = 4.0 * (growth * std::cos(angle) - 1.0);  // n * alpha
  if (rl.traceless_sq > 0.0) {
    const double beta = 4.0 * growth * std::sin(angle) / std::sqrt(nd * rl.traceless_sq);
    out.traceless = beta * rl.traceless;
    out.traceless_sq = beta * beta * rl.traceless_sq;
  } else {
    out.traceless = SymTensor(n);
  }
  return out;
}

}  // namespace detail

/// Inverse of exp_map at a0 (the map psi of the log coordinates).
/// Throws NotInExpImage when tr_{a0}(k_T^2) >= (4 pi)^2 / n.
inline SymTensor inv_exp(const SpdTensor& a0, const SpdTensor& a1) {
  detail::require(a0.dim() == a1.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  const std::size_t n = a0.dim();
  const detail::Whitening w(a0);
  const detail::RelativeLog rl = detail::relative_log(w, a1);
  if (!(rl.traceless_sq < exp_image_threshold(n)))
    detail::fail(ErrorKind::NotInExpImage,
                 "endpoint lies outside the image of the exponential map");
  const detail::TangentParts parts = detail::inverse_exp_parts(rl, n);
  SymTensor h = parts.traceless;
  for (std::size_t i = 0; i < n; ++i) h.set(i, i, h(i, i) + parts.trace / static_cast<double>(n));
  return w.unwhiten(h);
}

// ---------------------------------------------------------------------------
// Classification, distance, minimal paths

inline GeodesicCase classify(const FiberPoint& p0, const FiberPoint& p1) {
  detail::require(p0.dim() == p1.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  GeodesicCase out;
  if (p0.is_cone() && p1.is_cone()) {
    out.tag = CaseTag::BothCone;
    return out;
  }
  if (p0.is_cone()) {
    out.tag = CaseTag::FromCone;
    out.switch_time = 0.0;
    return out;
  }
  if (p1.is_cone()) {
    out.tag = CaseTag::ToCone;
    out.switch_time = 1.0;
    return out;
  }
  const std::size_t n = p0.dim();
  const detail::Whitening w(p0.tensor());
  const detail::RelativeLog rl = detail::relative_log(w, p1.tensor());
  SymTensor lw = rl.traceless;
  for (std::size_t i = 0; i < n; ++i) lw.set(i, i, lw(i, i) + rl.trace / static_cast<double>(n));
  out.log_coords = w.unwhiten(lw);
  out.traceless_norm_sq = rl.traceless_sq;
  if (rl.traceless_sq < exp_image_threshold(n)) {
    out.tag = CaseTag::Riemannian;
  } else {
    out.tag = CaseTag::ConeConcatenation;
    const double x = w.fourth_root_det;
    const double y = fourth_root_det(p1.tensor());
    out.switch_time = x / (x + y);
  }
  return out;
}

/// Distance in the completed fiber.
inline double fiber_distance(const FiberPoint& p0, const FiberPoint& p1) {
  detail::require(p0.dim() == p1.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  if (p0.is_cone() && p1.is_cone()) return 0.0;
  if (p0.is_cone()) return distance_to_cone(p1.tensor());
  if (p1.is_cone()) return distance_to_cone(p0.tensor());

  const std::size_t n = p0.dim();
  const double scale = 4.0 / std::sqrt(static_cast<double>(n));
  const detail::Whitening w(p0.tensor());
  const detail::RelativeLog rl = detail::relative_log(w, p1.tensor());
  const double x = w.fourth_root_det;
  const double y = fourth_root_det(p1.tensor());
  if (!(rl.traceless_sq < exp_image_threshold(n))) return scale * (x + y);
  // sqrt(A0) - 2 x y cos(theta) + sqrt(A1), rewritten to avoid cancellation
  const double half_angle = std::sqrt(static_cast<double>(n) * rl.traceless_sq) / 8.0;
  const double s = std::sin(half_angle);
  const double dxy = x - y;
  return scale * std::sqrt(dxy * dxy + 4.0 * x * y * s * s);
}

/// Point at parameter t in [0,1] on the unique minimal path from p0 to p1,
/// parametrized proportionally to arc length.
inline FiberPoint fiber_geodesic(const FiberPoint& p0, const FiberPoint& p1, double t) {
  detail::require(p0.dim() == p1.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  detail::require(t >= 0.0 && t <= 1.0, ErrorKind::InvalidInput, "t must lie in [0,1]");
  if (t == 0.0) return p0;
  if (t == 1.0) return p1;
  const std::size_t n = p0.dim();
  const double exponent = 4.0 / static_cast<double>(n);

  if (p0.is_cone() && p1.is_cone()) return FiberPoint::cone(n);
  if (p0.is_cone()) return FiberPoint::spd(p1.tensor().scaled(std::pow(t, exponent)));
  if (p1.is_cone()) return FiberPoint::spd(p0.tensor().scaled(std::pow(1.0 - t, exponent)));

  const SpdTensor& a0 = p0.tensor();
  const SpdTensor& a1 = p1.tensor();
  const detail::Whitening w(a0);
  const detail::RelativeLog rl = detail::relative_log(w, a1);
  if (rl.traceless_sq < exp_image_threshold(n)) {
    const detail::TangentParts h = detail::inverse_exp_parts(rl, n);
    return detail::exp_whitened(a0, w, h.trace, h.traceless, h.traceless_sq, t);
  }
  const double x = w.fourth_root_det;
  const double y = fourth_root_det(a1);
  const double t_star = x / (x + y);
  if (t < t_star) return FiberPoint::spd(a0.scaled(std::pow(1.0 - t / t_star, exponent)));
  if (t == t_star) return FiberPoint::cone(n);
  return FiberPoint::spd(a1.scaled(std::pow((t - t_star) / (1.0 - t_star), exponent)));
}

// ---------------------------------------------------------------------------
// Sampled paths and their length

class SampledPath {
 public:
  SampledPath(std::vector<double> times, std::vector<FiberPoint> points)
      : times_(std::move(times)), points_(std::move(points)) {
    detail::require(times_.size() == points_.size(), ErrorKind::InvalidInput,
                    "times and points differ in length");
    detail::require(times_.size() >= 2, ErrorKind::InvalidInput, "a path needs two samples");
    detail::require(times_.front() == 0.0 && times_.back() == 1.0, ErrorKind::InvalidInput,
                    "path times must run from 0 to 1");
    for (std::size_t i = 1; i < times_.size(); ++i)
      detail::require(times_[i] > times_[i - 1], ErrorKind::InvalidInput,
                      "path times must be strictly increasing");
    for (const auto& p : points_)
      detail::require(p.dim() == points_.front().dim(), ErrorKind::InvalidInput,
                      "path points differ in dimension");
  }

  /// Samples a curve at `count` uniform times in [0,1].
  template <typename Curve>
  static SampledPath uniform(std::size_t count, Curve&& curve) {
    detail::require(count >= 2, ErrorKind::InvalidInput, "a path needs two samples");
    std::vector<double> times(count);
    std::vector<FiberPoint> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      times[i] = i + 1 == count ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      points.push_back(curve(times[i]));
    }
    return SampledPath(std::move(times), std::move(points));
  }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<FiberPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return times_.size(); }

 private:
  std::vector<double> times_;
  std::vector<FiberPoint> points_;
};

namespace detail {

/// Flat-cone chart centred at a_j. With X = log(a_j^{-1/2} a_k a_j^{-1/2}),
/// rho the fourth root of det a_k and phi = sqrt(n)/4 ||X_T||, a_k maps to
///   (rho cos phi, rho sin phi X_T / ||X_T||).
/// Minimal paths are straight lines at constant speed in this chart, and at
/// a_j the fiber norm is (4/sqrt(n)) times the Euclidean norm of the chart
/// velocity.
struct ConeChartCoords {
  double axial = 0.0;
  SymTensor transverse;
};

inline ConeChartCoords cone_chart(const Whitening& w, const SpdTensor& a) {
  const RelativeLog rl = relative_log(w, a);
  const std::size_t n = a.dim();
  const double rho = w.fourth_root_det * std::exp(0.25 * rl.trace);
  const double norm = std::sqrt(rl.traceless_sq);
  const double phi = std::sqrt(static_cast<double>(n)) / 4.0 * norm;
  if (norm == 0.0) return {rho, SymTensor(n)};
  return {rho * std::cos(phi), (rho * std::sin(phi) / norm) * rl.traceless};
}

/// Mean speed over each segment of a sampled trajectory.
///
/// Segments touching the cone point, or whose endpoints lie on opposite rays
/// of a cone concatenation, are interpolated by the minimal path between
/// their endpoints. Everywhere else the speed is obtained from finite
/// differences (up to 7-point stencils inside each run of regular segments)
/// and averaged trapezoidally over the segment.
inline std::vector<double> segment_rates(std::span<const double> times,
                                         std::span<const FiberPoint> points) {
  const std::size_t m = times.size();
  std::vector<double> rates(m - 1, 0.0);
  std::vector<bool> singular(m - 1, false);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const FiberPoint& p = points[i];
    const FiberPoint& q = points[i + 1];
    const double dt = times[i + 1] - times[i];
    if (p.is_cone() || q.is_cone() ||
        classify(p, q).tag == CaseTag::ConeConcatenation) {
      singular[i] = true;
      rates[i] = fiber_distance(p, q) / dt;
    }
  }

  std::size_t lo = 0;
  while (lo + 1 < m) {
    if (singular[lo]) {
      ++lo;
      continue;
    }
    std::size_t hi = lo + 1;
    while (hi + 1 < m && !singular[hi]) ++hi;
    // samples lo..hi form a regular run
    const std::size_t len = hi - lo + 1;
    const std::size_t width = std::min<std::size_t>(7, len);
    std::vector<double> speed(len);
    for (std::size_t j = lo; j <= hi; ++j) {
      std::size_t start = j >= lo + width / 2 ? j - width / 2 : lo;
      start = std::min(start, hi + 1 - width);
      const std::vector<double> wts = first_derivative_weights(times[j], times.subspan(start, width));
      const Whitening w(points[j].tensor());
      double d_axial = 0.0;
      SymTensor d_transverse(points[j].dim());
      for (std::size_t k = 0; k < width; ++k) {
        const ConeChartCoords c = cone_chart(w, points[start + k].tensor());
        d_axial += wts[k] * c.axial;
        d_transverse.axpy(wts[k], c.transverse);
      }
      const double nd = static_cast<double>(points[j].dim());
      speed[j - lo] = 4.0 / std::sqrt(nd) * std::sqrt(d_axial * d_axial + d_transverse.frobenius_sq());
    }
    for (std::size_t j = lo; j < hi; ++j) rates[j] = 0.5 * (speed[j - lo] + speed[j + 1 - lo]);
    lo = hi;
  }
  return rates;
}

}  // namespace detail

/// Length of a sampled path by quadrature of its finite-difference speed.
inline double path_length(const SampledPath& path) {
  const auto rates = detail::segment_rates(path.times(), path.points());
  double total = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i)
    total += rates[i] * (path.times()[i + 1] - path.times()[i]);
  return total;
}

/// Sum of distances between consecutive samples; never exceeds the length
/// of any curve through the samples.
inline double path_length_lower_bound(const SampledPath& path) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    total += fiber_distance(path.points()[i], path.points()[i + 1]);
  return total;
}

}  // namespace metgeo
