#pragma once

// Seeded generators for fiber points used by the verification sweeps.
// Each trial derives its own engine from (seed, trial index), so results do
// not depend on evaluation order or thread count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

#include "metgeo/fiber_geodesics.hpp"
#include "metgeo/spd_core.hpp"

namespace metgeo::random {

using Engine = std::mt19937_64;

inline Engine trial_engine(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Engine(seq);
}

inline double normal(Engine& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }
inline double uniform(Engine& g, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Symmetric matrix with independent N(0, sigma^2) entries on and above the diagonal.
inline SymTensor symmetric(Engine& g, std::size_t n, double sigma = 1.0) {
  SymTensor s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) s.set(i, j, sigma * normal(g));
  return s;
}

/// Traceless symmetric matrix of unit Frobenius norm.
inline SymTensor traceless_direction(Engine& g, std::size_t n) {
  for (;;) {
    SymTensor s = symmetric(g, n);
    const double tr = s.trace() / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) s.set(i, i, s(i, i) - tr);
    const double norm = std::sqrt(s.frobenius_sq());
    if (norm > 1e-3) return (1.0 / norm) * s;
  }
}

/// Random orthogonal matrix (eigenvector frame of a random symmetric matrix).
inline Matrix orthogonal(Engine& g, std::size_t n) { return sym_eigen(symmetric(g, n)).frame; }

/// exp of a random symmetric matrix: log-eigenvalue spread of order sigma.
inline SpdTensor spd(Engine& g, std::size_t n, double sigma = 0.5) {
  return sym_exp(symmetric(g, n, sigma));
}

/// a0^{1/2} exp(trace/n I + sqrt(traceless_sq) D) a0^{1/2} for a traceless
/// unit direction D: its log coordinates relative to a0 have
/// tr_{a0} k = trace and tr_{a0}(k_T^2) = traceless_sq.
inline SpdTensor along(const SpdTensor& a0, double trace, double traceless_sq,
                       const SymTensor& direction) {
  const std::size_t n = a0.dim();
  SymTensor l = std::sqrt(traceless_sq) * direction;
  for (std::size_t i = 0; i < n; ++i) l.set(i, i, l(i, i) + trace / static_cast<double>(n));
  const SpdTensor root = spd_sqrt(a0);
  return SpdTensor::trusted(congruence(root.tensor().matrix(), sym_exp(l).tensor()));
}

/// along() with a random direction.
inline SpdTensor relative_to(Engine& g, const SpdTensor& a0, double trace, double traceless_sq) {
  return along(a0, trace, traceless_sq, traceless_direction(g, a0.dim()));
}

enum class PairKind { Riemannian, Cone, Conformal, NearDegenerate, ConeEndpoint };

struct Pair {
  FiberPoint p0;
  FiberPoint p1;
  PairKind kind;
};

/// Random pair of the requested kind. Riemannian pairs use up to
/// `max_fraction` of the exp-image threshold for their traceless part.
inline Pair pair(Engine& g, std::size_t n, PairKind kind, double max_fraction = 0.95) {
  const double thr = exp_image_threshold(n);
  SpdTensor a0 = spd(g, n);
  switch (kind) {
    case PairKind::Riemannian: {
      const double trace = normal(g);
      const double tsq = uniform(g, 0.0, max_fraction) * thr;
      const SpdTensor a1 = relative_to(g, a0, trace, tsq);
      return {FiberPoint::spd(a0), FiberPoint::spd(a1), kind};
    }
    case PairKind::Cone: {
      const double trace = normal(g);
      const double tsq = uniform(g, 1.0, 3.0) * thr;
      const SpdTensor a1 = relative_to(g, a0, trace, tsq);
      return {FiberPoint::spd(a0), FiberPoint::spd(a1), kind};
    }
    case PairKind::Conformal: {
      const double c = std::exp(1.5 * normal(g));
      return {FiberPoint::spd(a0), FiberPoint::spd(a0.scaled(c)), kind};
    }
    case PairKind::NearDegenerate: {
      // one endpoint close to the boundary of the cone of definite tensors
      SymTensor d(n);
      const double tiny = std::pow(10.0, uniform(g, -9.0, -4.0));
      for (std::size_t i = 0; i < n; ++i) d.set(i, i, i + 1 == n ? tiny : std::exp(normal(g)));
      const SymTensor a1 = congruence(orthogonal(g, n), d);
      FiberPoint p1 = FiberPoint::spd(SpdTensor::make(a1));
      if (uniform(g) < 0.5) return {std::move(p1), FiberPoint::spd(a0), kind};
      return {FiberPoint::spd(a0), std::move(p1), kind};
    }
    case PairKind::ConeEndpoint:
      if (uniform(g) < 0.5) return {FiberPoint::cone(n), FiberPoint::spd(a0), kind};
      return {FiberPoint::spd(a0), FiberPoint::cone(n), kind};
  }
  return {FiberPoint::spd(a0), FiberPoint::spd(a0), kind};
}

}  // namespace metgeo::random
