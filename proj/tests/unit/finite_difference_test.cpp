#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "metgeo/detail/finite_difference.hpp"

using metgeo::detail::first_derivative_weights;

TEST(FirstDerivativeWeights, ExactOnPolynomialsUpToStencilDegree) {
  const std::vector<double> nodes{0.0, 0.1, 0.25, 0.3, 0.7, 0.71, 1.0};
  for (std::size_t m = 2; m <= nodes.size(); ++m) {
    const std::span<const double> sub(nodes.data(), m);
    for (double x0 : {0.0, 0.2, 0.71}) {
      const auto w = first_derivative_weights(x0, sub);
      for (std::size_t deg = 0; deg < m; ++deg) {
        double approx = 0.0;
        for (std::size_t k = 0; k < m; ++k) approx += w[k] * std::pow(sub[k], static_cast<double>(deg));
        const double exact = deg == 0 ? 0.0 : deg * std::pow(x0, static_cast<double>(deg - 1));
        EXPECT_NEAR(approx, exact, 1e-8) << "m=" << m << " deg=" << deg << " x0=" << x0;
      }
    }
  }
}

TEST(FirstDerivativeWeights, CentralThreePoint) {
  const std::vector<double> nodes{-1.0, 0.0, 1.0};
  const auto w = first_derivative_weights(0.0, nodes);
  EXPECT_NEAR(w[0], -0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
}
