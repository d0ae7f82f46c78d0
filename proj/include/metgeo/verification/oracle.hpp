#pragma once

// Brute-force path minimization in the fiber. Paths are piecewise linear in
// matrix entries, speeds come from a Cholesky factorization, and nothing
// here calls into the closed-form geometry, so agreement with
// fiber_distance is a genuine cross-check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "metgeo/error.hpp"
#include "metgeo/fiber_geodesics.hpp"
#include "metgeo/field_space.hpp"
#include "metgeo/random.hpp"
#include "metgeo/spd_core.hpp"

namespace metgeo {

struct OracleConfig {
  int waypoints = 33;  // including both endpoints
  int quadrature_substeps = 8;
  int iterations = 20000;  // per restart
  int restarts = 4;
  double step_scale = 0.25;
  std::uint64_t seed = 1;

  void validate() const {
    detail::require(waypoints >= 3, ErrorKind::InvalidInput, "oracle needs at least 3 waypoints");
    detail::require(quadrature_substeps >= 8, ErrorKind::InvalidInput,
                    "oracle needs at least 8 quadrature substeps");
    detail::require(iterations >= 1 && restarts >= 1, ErrorKind::InvalidInput,
                    "oracle iterations and restarts must be positive");
    detail::require(step_scale > 0.0 && step_scale <= 1.0, ErrorKind::InvalidInput,
                    "oracle step scale must lie in (0, 1]");
  }
};

struct OracleResult {
  double length = 0.0;
  double min_fourth_root_det = 0.0;  // over the waypoints of the best path
  std::vector<SymTensor> waypoints;
};

namespace oracle_detail {

constexpr std::size_t kMaxDim = 8;
constexpr double kEigenFloor = 1e-14;

using Flat = std::vector<double>;  // row-major n x n

inline Flat flatten(const SymTensor& s) {
  const auto v = s.matrix().values();
  return Flat(v.begin(), v.end());
}

inline SymTensor unflatten(const Flat& f, std::size_t n) {
  return SymTensor::from_row_major(n, f);
}

/// ||delta||_m = sqrt(tr(m^-1 delta m^-1 delta)) * det(m)^(1/4), using m = L L^T.
inline double speed(const double* m, const double* delta, std::size_t n) {
  std::array<double, kMaxDim * kMaxDim> l{};
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(m[i * n + i]));
  const double pivot_floor = 1e-16 * std::max(scale, 1e-300);
  double diag_prod = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = m[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    d = std::sqrt(std::max(d, pivot_floor));
    l[j * n + j] = d;
    diag_prod *= d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / d;
    }
  }
  // y = L^-1 delta, then z = L^-1 y^T
  std::array<double, kMaxDim * kMaxDim> y{};
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double s = delta[i * n + c];
      for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * y[k * n + c];
      y[i * n + c] = s / l[i * n + i];
    }
  double frob = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::array<double, kMaxDim> z{};
    for (std::size_t i = 0; i < n; ++i) {
      double s = y[c * n + i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * z[k];
      z[i] = s / l[i * n + i];
      frob += z[i] * z[i];
    }
  }
  return std::sqrt(frob) * std::sqrt(diag_prod);
}

/// Quadrature of the speed along the straight segment a -> b. The parameter
/// is graded as u^4 near both ends so the integrable blow-up of the speed
/// at near-degenerate endpoints is resolved.
inline double segment_length(const Flat& a, const Flat& b, std::size_t n, int panels) {
  static constexpr std::array<double, 3> node{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> weight{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const std::size_t nn = n * n;
  std::array<double, kMaxDim * kMaxDim> delta{}, m{};
  for (std::size_t k = 0; k < nn; ++k) delta[k] = b[k] - a[k];
  double total = 0.0;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t g = 0; g < 3; ++g) {
      const double u = h * (p + 0.5 * (1.0 + node[g]));
      const double f = u * u * u * u;
      const double v = 1.0 - u;
      const double gg = v * v * v * v;
      const double s = f / (f + gg);
      const double ds = 4.0 * u * u * u * v * v * v / ((f + gg) * (f + gg));
      for (std::size_t k = 0; k < nn; ++k) m[k] = a[k] + s * delta[k];
      total += 0.5 * h * weight[g] * ds * speed(m.data(), delta.data(), n);
    }
  }
  return total;
}

/// Nearest matrix with all eigenvalues >= kEigenFloor.
inline Flat clamp(const Flat& f, std::size_t n) {
  const EigenSystem es = sym_eigen(unflatten(f, n));
  if (es.eigenvalues.back() >= kEigenFloor) return f;
  return flatten(apply_spectral(es, [](double x) { return std::max(x, kEigenFloor); }));
}

inline double frob(const Flat& f) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s);
}

inline double fourth_root_det_of(const Flat& f, std::size_t n) {
  const EigenSystem es = sym_eigen(unflatten(f, n));
  double log_sum = 0.0;
  for (double x : es.eigenvalues) {
    if (x <= 0.0) return 0.0;
    log_sum += std::log(x);
  }
  return std::exp(0.25 * log_sum);
}

class PathSearch {
 public:
  PathSearch(Flat a, Flat b, std::size_t n, const OracleConfig& cfg)
      : n_(n), cfg_(cfg), a_(std::move(a)), b_(std::move(b)) {
    floor_scale_ = 1e-3 * std::max(frob(a_), frob(b_));
  }

  std::vector<Flat> chord(int m) const {
    std::vector<Flat> w(m, a_);
    for (int j = 1; j < m; ++j) {
      const double s = static_cast<double>(j) / (m - 1);
      for (std::size_t k = 0; k < a_.size(); ++k) w[j][k] = (1.0 - s) * a_[k] + s * b_[k];
    }
    w.back() = b_;
    return w;
  }

  /// exp((1 - s) log a + s log b) at m evenly spaced s: the log-Euclidean
  /// interpolant, a smooth start that avoids the cone.
  std::vector<Flat> log_euclidean(int m) const {
    const SymTensor la = spd_log(SpdTensor::trusted(unflatten(a_, n_)));
    const SymTensor lb = spd_log(SpdTensor::trusted(unflatten(b_, n_)));
    std::vector<Flat> w(m, a_);
    for (int j = 1; j + 1 < m; ++j) {
      const double s = static_cast<double>(j) / (m - 1);
      w[j] = flatten(sym_exp((1.0 - s) * la + s * lb).tensor());
    }
    w.back() = b_;
    return w;
  }

  /// Two straight legs through eps * (a + b) / 2, with m >= 3 waypoints.
  std::vector<Flat> through_midpoint(int m, double eps) const {
    Flat c(a_.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.5 * eps * (a_[k] + b_[k]);
    return resample({a_, clamp(c, n_), b_}, m);
  }

  /// Same polygon, `m` waypoints spread evenly by index along the old ones.
  static std::vector<Flat> resample(const std::vector<Flat>& w, int m) {
    const int old = static_cast<int>(w.size());
    std::vector<Flat> out(m, w.front());
    for (int j = 1; j + 1 < m; ++j) {
      const double pos = static_cast<double>(j) * (old - 1) / (m - 1);
      const int i = std::min(old - 2, static_cast<int>(pos));
      const double f = pos - i;
      for (std::size_t k = 0; k < out[j].size(); ++k)
        out[j][k] = (1.0 - f) * w[i][k] + f * w[i + 1][k];
    }
    out.back() = w.back();
    return out;
  }

  double length(const std::vector<Flat>& w, int panels) const {
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < w.size(); ++j)
      total += segment_length(w[j], w[j + 1], n_, panels);
    return total;
  }

  /// Local search from `w`: perturbs a window of interior waypoints by a
  /// smooth bump, keeping moves that shorten the path.
  std::vector<Flat> improve(std::vector<Flat> w, int iterations, random::Engine& g) const {
    const int m = static_cast<int>(w.size());
    const int panels = cfg_.quadrature_substeps;
    std::vector<double> seg(m - 1);
    for (int j = 0; j + 1 < m; ++j) seg[j] = segment_length(w[j], w[j + 1], n_, panels);
    double sigma = cfg_.step_scale;
    const double sigma_min = 1e-6 * cfg_.step_scale;
    const double entry_norm = 1.0 / std::sqrt(0.5 * static_cast<double>(n_ * (n_ + 1)));
    const int max_half_width = std::max(1, (m - 2) / 4);

    for (int it = 0; it < iterations; ++it) {
      const int center = 1 + static_cast<int>(random::uniform(g) * (m - 2));
      const int half = random::uniform(g) < 0.4
                           ? 0
                           : 1 + static_cast<int>(random::uniform(g) * max_half_width);
      const int lo = std::max(1, center - half);
      const int hi = std::min(m - 2, center + half);
      const bool radial = random::uniform(g) < 0.3;
      const SymTensor dir = random::symmetric(g, n_, entry_norm);
      // log-uniform spread around the adaptive step keeps both coarse and
      // fine moves available
      const double step = sigma * std::pow(10.0, random::uniform(g, -2.0, 0.5));
      const double radial_step = step * random::normal(g);

      std::vector<Flat> trial(w.begin() + lo, w.begin() + hi + 1);
      for (int j = lo; j <= hi; ++j) {
        const double bump =
            half == 0 ? 1.0
                      : std::pow(std::cos(0.5 * std::numbers::pi * (j - center) / (half + 1.0)), 2);
        Flat& x = trial[j - lo];
        if (radial) {
          const double f = std::exp(bump * radial_step);
          for (double& v : x) v *= f;
        } else {
          const double scale = step * bump * std::max(frob(x), floor_scale_);
          const auto dv = dir.matrix().values();
          for (std::size_t k = 0; k < x.size(); ++k) x[k] += scale * dv[k];
          x = clamp(x, n_);
        }
      }
      double before = 0.0, after = 0.0;
      std::vector<double> new_seg(hi - lo + 2);
      for (int j = lo - 1; j <= hi; ++j) {
        before += seg[j];
        const Flat& p = j < lo ? w[j] : trial[j - lo];
        const Flat& q = j + 1 > hi ? w[j + 1] : trial[j + 1 - lo];
        new_seg[j - lo + 1] = segment_length(p, q, n_, panels);
        after += new_seg[j - lo + 1];
      }
      if (after < before) {
        for (int j = lo; j <= hi; ++j) w[j] = std::move(trial[j - lo]);
        for (int j = lo - 1; j <= hi; ++j) seg[j] = new_seg[j - lo + 1];
        sigma = std::min(cfg_.step_scale, sigma * 1.3);
      } else {
        sigma = std::max(sigma_min, sigma * 0.95);
      }
    }
    return w;
  }

  /// Coarse-to-fine search: 3, 5, 9, ... waypoints up to the configured
  /// count, each level starting from the previous level's best polygon.
  std::vector<Flat> refine(std::vector<Flat> w, random::Engine& g) const {
    std::vector<int> levels;
    for (int m = static_cast<int>(w.size()); m < cfg_.waypoints; m = 2 * m - 1) levels.push_back(m);
    levels.push_back(cfg_.waypoints);
    // iterations in proportion to the number of waypoints at each level
    int total = 0;
    for (int m : levels) total += m;
    for (int m : levels)
      w = improve(resample(w, m), std::max(1, static_cast<int>(static_cast<long>(cfg_.iterations) * m / total)), g);
    return w;
  }

 private:
  std::size_t n_;
  const OracleConfig& cfg_;
  Flat a_, b_;
  double floor_scale_;
};

inline Flat endpoint(const FiberPoint& p) {
  return clamp(flatten(p.as_matrix()), p.dim());
}

}  // namespace oracle_detail

/// Shortest piecewise-linear path found between p0 and p1. The reported
/// length is re-integrated with four times the search quadrature.
inline OracleResult brute_force_path(const FiberPoint& p0, const FiberPoint& p1,
                                     const OracleConfig& cfg = {}) {
  using namespace oracle_detail;
  cfg.validate();
  detail::require(p0.dim() == p1.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  detail::require(!(p0.is_cone() && p1.is_cone()), ErrorKind::InvalidInput,
                  "oracle endpoints cannot both be the cone point");
  const std::size_t n = p0.dim();
  detail::require(n <= kMaxDim, ErrorKind::InvalidInput, "oracle supports dimension up to 8");

  const Flat a = endpoint(p0);
  const Flat b = endpoint(p1);
  OracleResult out;
  if (!p0.is_cone() && !p1.is_cone() && p0.tensor().tensor() == p1.tensor().tensor()) {
    out.waypoints = {p0.as_matrix(), p1.as_matrix()};
    out.min_fourth_root_det = fourth_root_det_of(a, n);
    return out;
  }

  const PathSearch search(a, b, n, cfg);
  const int panels = cfg.quadrature_substeps;
  std::vector<Flat> best_mid;
  double best_mid_len = std::numeric_limits<double>::infinity();
  for (double eps : {1e-6, 1e-3, 0.03, 0.1, 0.3, 0.6}) {
    auto w = search.through_midpoint(3, eps);
    const double len = search.length(w, panels);
    if (len < best_mid_len) {
      best_mid_len = len;
      best_mid = std::move(w);
    }
  }

  std::vector<Flat> best;
  double best_len = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    random::Engine g = random::trial_engine(cfg.seed, static_cast<std::uint64_t>(r), 0x5eed);
    // chord, cone-seeking midpoint and log-Euclidean starts in turn; the
    // smooth starts skip the coarsest levels, which favour the cone
    const int start_level = std::min(9, cfg.waypoints);
    std::vector<Flat> start;
    if (r % 3 == 1) {
      start = best_mid;
    } else if (r % 3 == 2 && !p0.is_cone() && !p1.is_cone()) {
      start = search.log_euclidean(start_level);
    } else {
      start = search.chord(start_level);
    }
    auto w = search.refine(std::move(start), g);
    const double len = search.length(w, panels);
    if (len < best_len) {
      best_len = len;
      best = std::move(w);
    }
  }

  out.length = search.length(best, 4 * panels);
  out.min_fourth_root_det = std::numeric_limits<double>::infinity();
  for (const Flat& x : best) {
    out.min_fourth_root_det = std::min(out.min_fourth_root_det, fourth_root_det_of(x, n));
    out.waypoints.push_back(unflatten(x, n));
  }
  return out;
}

inline double brute_force_distance(const FiberPoint& p0, const FiberPoint& p1,
                                   const OracleConfig& cfg = {}) {
  return brute_force_path(p0, p1, cfg).length;
}

/// (sum_i w_i L_i^2)^(1/2) over per-sample oracle lengths: the length of
/// the field path whose samples follow the per-sample oracle paths with
/// speeds matched in proportion to their lengths.
inline double brute_force_field_distance(const MetricField& f0, const MetricField& f1,
                                         const OracleConfig& cfg = {}) {
  detail::require(same_grid(f0, f1), ErrorKind::InvalidInput, "fields live on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < f0.size(); ++i) {
    if (f0[i].is_cone() && f1[i].is_cone()) continue;
    const double len = brute_force_distance(f0[i], f1[i], cfg);
    sum += (*f0.grid())[i].weight * len * len;
  }
  return std::sqrt(sum);
}

}  // namespace metgeo
