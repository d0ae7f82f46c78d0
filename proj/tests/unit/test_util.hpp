#pragma once

#include <cmath>

#include "metgeo/fiber_geodesics.hpp"
#include "metgeo/random.hpp"

namespace metgeo::testing {

inline double max_entry_diff(const SymTensor& a, const SymTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double rel(double value, double reference) {
  return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

inline FiberPoint spd_point(std::initializer_list<std::initializer_list<double>> rows) {
  return FiberPoint::spd(SpdTensor::make(SymTensor::from_rows(rows)));
}

}  // namespace metgeo::testing
