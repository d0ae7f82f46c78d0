#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace metgeo::detail {

/// First-derivative weights at x0 for arbitrary distinct nodes
/// (Fornberg's recursion, restricted to derivative orders 0 and 1).
inline std::vector<double> first_derivative_weights(double x0, std::span<const double> nodes) {
  const std::size_t m = nodes.size();
  // c[k][d]: weight of node k for derivative d, built up node by node.
  std::vector<double> c0(m, 0.0), c1(m, 0.0);
  if (m == 0) return c1;
  c0[0] = 1.0;
  double c_prev = 1.0;
  double dx_prev = nodes[0] - x0;
  for (std::size_t i = 1; i < m; ++i) {
    double c_cur = 1.0;
    const double dx_i = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double diff = nodes[i] - nodes[j];
      c_cur *= diff;
      if (j == i - 1) {
        c1[i] = c_prev * (c0[i - 1] - dx_prev * c1[i - 1]) / c_cur;
        c0[i] = -c_prev * dx_prev * c0[i - 1] / c_cur;
      }
      c1[j] = (dx_i * c1[j] - c0[j]) / diff;
      c0[j] = dx_i * c0[j] / diff;
    }
    c_prev = c_cur;
    dx_prev = dx_i;
  }
  return c1;
}

}  // namespace metgeo::detail
