#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "posmom/errors.hpp"
#include "posmom/quadrature.hpp"

namespace posmom {
namespace {

TEST(GaussLegendre, OnePointIsMidpoint) {
  const auto rule = gauss_legendre(1, -1.0, 1.0);
  ASSERT_EQ(rule.size(), 1u);
  EXPECT_NEAR(rule.nodes[0], 0.0, 1e-15);
  EXPECT_NEAR(rule.weights[0], 2.0, 1e-15);
}

TEST(GaussLegendre, TwoPointRule) {
  const auto rule = gauss_legendre(2, -1.0, 1.0);
  ASSERT_EQ(rule.size(), 2u);
  EXPECT_NEAR(rule.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(rule.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(rule.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(rule.weights[1], 1.0, 1e-15);
  double integral = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) integral += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  EXPECT_NEAR(integral, 2.0 / 3.0, 1e-15);
}

TEST(GaussLegendre, RejectsBadArguments) {
  EXPECT_THROW(gauss_legendre(0, -1.0, 1.0), InvalidArgument);
  EXPECT_THROW(gauss_legendre(3, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(gauss_legendre(3, 2.0, -1.0), InvalidArgument);
}

TEST(GaussLegendre, NodesOrderedInsideAndWeightsSumToLength) {
  for (int n : {1, 2, 5, 30, 40, 100, 350, 500}) {
    const auto rule = gauss_legendre(n, -7.0, 7.0);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(rule.nodes[i], -7.0);
      EXPECT_LT(rule.nodes[i], 7.0);
      if (i > 0) EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
      EXPECT_GT(rule.weights[i], 0.0);
      sum += rule.weights[i];
    }
    EXPECT_NEAR(sum, 14.0, 14.0 * 1e-12) << "n = " << n;
  }
}

// Random polynomials of degree 2n-1 against their antiderivatives.
TEST(GaussLegendre, ExactForDegreeTwoNMinusOne) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double lo = -1.3;
  const double hi = 2.1;
  for (int n : {1, 2, 3, 6, 10, 20}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> a(2 * n);
      for (double& c : a) c = coef(rng);
      auto poly = [&](double x) {
        double v = 0.0;
        for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * x + *it;
        return v;
      };
      double exact = 0.0;
      double abs_scale = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double term = a[k] * (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
        exact += term;
        abs_scale += std::abs(term);
      }
      const auto rule = gauss_legendre(n, lo, hi);
      double quad = 0.0;
      for (int i = 0; i < n; ++i) quad += rule.weights[i] * poly(rule.nodes[i]);
      EXPECT_NEAR(quad, exact, 1e-10 * std::max(abs_scale, 1.0)) << "n = " << n;
    }
  }
}

TEST(GaussLegendre, AffineCovariance) {
  for (int n : {3, 17, 64}) {
    const auto ref = gauss_legendre(n, -1.0, 1.0);
    const auto rule = gauss_legendre(n, -20.0, 15.0);
    const double half = 17.5;
    const double mid = -2.5;
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(rule.nodes[i], mid + half * ref.nodes[i], 1e-13 * 20.0);
      EXPECT_NEAR(rule.weights[i], half * ref.weights[i], 1e-13 * half);
    }
  }
}

TEST(TensorGrid, OnePointTwoD) {
  const VelocityGrid grid(gauss_legendre(1, -1.0, 1.0), 2);
  ASSERT_EQ(grid.size(), 1);
  EXPECT_NEAR(grid.component(0)[0], 0.0, 1e-15);
  EXPECT_NEAR(grid.component(1)[0], 0.0, 1e-15);
  EXPECT_NEAR(grid.weights()[0], 4.0, 1e-15);
}

TEST(TensorGrid, TwoPointTwoD) {
  const auto rule = gauss_legendre(2, -1.0, 1.0);
  const VelocityGrid grid = tensor_grid(rule, 2);
  ASSERT_EQ(grid.size(), 4);
  double integral = 0.0;
  for (Eigen::Index k = 0; k < 4; ++k) {
    EXPECT_NEAR(grid.weights()[k], 1.0, 1e-15);
    const double x = grid.component(0)[k];
    const double y = grid.component(1)[k];
    integral += grid.weights()[k] * x * x * y * y;
  }
  EXPECT_NEAR(integral, 4.0 / 9.0, 1e-15);
  // Row-major in the first component.
  EXPECT_EQ(grid.component(0)[0], rule.nodes[0]);
  EXPECT_EQ(grid.component(1)[0], rule.nodes[0]);
  EXPECT_EQ(grid.component(0)[1], rule.nodes[0]);
  EXPECT_EQ(grid.component(1)[1], rule.nodes[1]);
  EXPECT_EQ(grid.component(0)[2], rule.nodes[1]);
}

TEST(TensorGrid, WeightsSumToVolume) {
  const VelocityGrid grid(gauss_legendre(40, -7.0, 7.0), 2);
  EXPECT_EQ(grid.size(), 1600);
  EXPECT_NEAR(grid.weights().sum(), grid.volume(), 1e-12 * 196.0);
  EXPECT_NEAR(grid.volume(), 196.0, 1e-12);
  EXPECT_NEAR(grid.box(1).max_speed(), 7.0, 0.0);
}

TEST(TensorGrid, RejectsBadDimension) {
  EXPECT_THROW(VelocityGrid(gauss_legendre(3, -1.0, 1.0), 3), InvalidArgument);
  EXPECT_THROW(VelocityGrid(gauss_legendre(3, -1.0, 1.0), 0), InvalidArgument);
}

}  // namespace
}  // namespace posmom
