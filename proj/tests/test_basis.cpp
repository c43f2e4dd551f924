#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "posmom/basis.hpp"
#include "posmom/errors.hpp"

namespace posmom {
namespace {

std::shared_ptr<const VelocityGrid> grid_1d(int n, double lo, double hi) {
  return std::make_shared<const VelocityGrid>(gauss_legendre(n, lo, hi), 1);
}

std::shared_ptr<const VelocityGrid> grid_2d(int n, double lo, double hi) {
  return std::make_shared<const VelocityGrid>(gauss_legendre(n, lo, hi), 2);
}

TEST(Basis, LowOrderMatrixOnTwoNodes) {
  const auto basis = build_basis(grid_1d(2, -1.0, 1.0), 2, {.allow_low_order = true, .allow_square = true});
  const double r = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(basis->A()(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(basis->A()(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(basis->A()(1, 0), -r, 1e-15);
  EXPECT_NEAR(basis->A()(1, 1), r, 1e-15);
}

TEST(Basis, TwoDMomentCounts) {
  EXPECT_EQ(build_basis(grid_2d(10, -7.0, 7.0), 3)->moment_count(), 6);
  EXPECT_EQ(build_basis(grid_2d(10, -7.0, 7.0), 5)->moment_count(), 15);
  for (int m = 1; m <= 8; ++m) {
    const auto basis = build_basis(grid_2d(10, -7.0, 7.0), m, {.allow_low_order = true});
    EXPECT_EQ(basis->moment_count(), m * (m + 1) / 2);
    EXPECT_EQ(moment_count_2d(m), m * (m + 1) / 2);
  }
}

TEST(Basis, TwoDExponentOrdering) {
  const auto basis = build_basis(grid_2d(6, -1.0, 1.0), 3);
  const std::vector<std::array<int, 2>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(basis->exponents(), expected);
}

TEST(Basis, RejectsTooFewNodesAndLowOrder) {
  EXPECT_THROW(build_basis(grid_1d(3, -1.0, 1.0), 3), ConfigurationError);
  EXPECT_THROW(build_basis(grid_1d(2, -1.0, 1.0), 3), ConfigurationError);
  EXPECT_THROW(build_basis(grid_1d(10, -1.0, 1.0), 2), ConfigurationError);
  EXPECT_THROW(build_basis(grid_2d(2, -1.0, 1.0), 3), ConfigurationError);
  EXPECT_NO_THROW(build_basis(grid_1d(3, -1.0, 1.0), 3, {.allow_square = true}));
}

TEST(Basis, FullRowRankWhenTall) {
  const auto basis = build_basis(grid_1d(40, -20.0, 20.0), 22);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis->AL());
  const auto s = svd.singularValues();
  EXPECT_GT(s.minCoeff(), 1e-12 * s.maxCoeff());
}

TEST(Moments, ZeroAndConstant) {
  const auto basis = build_basis(grid_1d(2, -1.0, 1.0), 2, {.allow_low_order = true, .allow_square = true});
  EXPECT_EQ(moments(*basis, Eigen::VectorXd::Zero(2)).cwiseAbs().maxCoeff(), 0.0);
  const MomentVector lambda = moments(*basis, Eigen::VectorXd::Ones(2));
  EXPECT_NEAR(lambda[0], 2.0, 1e-15);
  EXPECT_NEAR(lambda[1], 0.0, 1e-15);
}

TEST(Moments, StandardMaxwellianRawMoments) {
  const auto grid = grid_1d(40, -7.0, 7.0);
  const auto basis = build_basis(grid, 3);
  const WeightVector w = maxwellian_values(*grid, MacroState{});
  const Eigen::VectorXd raw = basis->to_raw() * moments(*basis, w);
  EXPECT_NEAR(raw[0], 1.0, 1e-8);
  EXPECT_NEAR(raw[1], 0.0, 1e-8);
  EXPECT_NEAR(raw[2], 1.0, 1e-8);
}

// Conserved rows against direct quadrature sums, on an off-center box where
// the scaled and raw monomials differ.
TEST(Moments, RawConservedMatchesQuadratureSums) {
  const auto grid = grid_1d(30, -3.0, 9.0);
  const auto basis = build_basis(grid, 8);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  WeightVector w(grid->size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = u(rng);
  const Eigen::VectorXd c = raw_conserved(*basis, moments(*basis, w));
  const auto& xi = grid->component(0);
  const auto& om = grid->weights();
  const double m0 = (om.array() * w.array()).sum();
  const double m1 = (om.array() * w.array() * xi.array()).sum();
  const double m2 = (om.array() * w.array() * xi.array().square()).sum();
  EXPECT_NEAR(c[0], m0, 1e-13 * std::abs(m0));
  EXPECT_NEAR(c[1], m1, 1e-13 * std::abs(m2));
  EXPECT_NEAR(c[2], m2, 1e-13 * std::abs(m2));
}

TEST(Moments, ToRawIsExactForHighOrders) {
  const auto grid = grid_1d(40, -3.0, 5.0);
  const auto basis = build_basis(grid, 10);
  const WeightVector w = maxwellian_values(*grid, MacroState{.rho = 1.0, .v = {1.0, 0.0}, .theta = 0.8});
  const Eigen::VectorXd raw = basis->to_raw() * moments(*basis, w);
  for (int k = 0; k < 10; ++k) {
    const double direct = (grid->weights().array() * w.array() * grid->component(0).array().pow(k)).sum();
    EXPECT_NEAR(raw[k], direct, 1e-11 * std::max(1.0, std::abs(direct))) << "k = " << k;
  }
}

class UnitBoxBasis : public ::testing::Test {
 protected:
  // On [-1, 1] the scaled and raw monomials coincide.
  std::shared_ptr<const MomentBasis> basis = build_basis(grid_1d(4, -1.0, 1.0), 3);
};

TEST_F(UnitBoxBasis, MacroFromMoments) {
  const MacroState a = macro_from_moments(*basis, Eigen::Vector3d(1.0, 0.0, 1.0));
  EXPECT_DOUBLE_EQ(a.rho, 1.0);
  EXPECT_DOUBLE_EQ(a.v[0], 0.0);
  EXPECT_DOUBLE_EQ(a.theta, 1.0);
  const MacroState b = macro_from_moments(*basis, Eigen::Vector3d(2.0, 2.0, 4.0));
  EXPECT_DOUBLE_EQ(b.rho, 2.0);
  EXPECT_DOUBLE_EQ(b.v[0], 1.0);
  EXPECT_DOUBLE_EQ(b.theta, 1.0);
  const MacroState c = macro_from_moments(*basis, Eigen::Vector3d(7.0, 0.0, 7.0));
  EXPECT_DOUBLE_EQ(c.rho, 7.0);
  EXPECT_DOUBLE_EQ(c.theta, 1.0);
}

TEST_F(UnitBoxBasis, NonPhysicalStatesThrow) {
  EXPECT_THROW(macro_from_moments(*basis, Eigen::Vector3d(-1.0, 0.0, 1.0)), NonPhysicalState);
  EXPECT_THROW(macro_from_moments(*basis, Eigen::Vector3d(0.0, 0.0, 1.0)), NonPhysicalState);
  EXPECT_THROW(macro_from_moments(*basis, Eigen::Vector3d(1.0, 1.0, 1.0)), NonPhysicalState);
  EXPECT_THROW(macro_from_moments(*basis, Eigen::Vector2d(1.0, 0.0)), InvalidArgument);
}

TEST(Macro, RoundTripPositiveWeights) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  const auto grid = grid_1d(12, -5.0, 3.0);
  const auto basis = build_basis(grid, 5);
  for (int trial = 0; trial < 200; ++trial) {
    WeightVector w(grid->size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = u(rng);
    const MacroState m = macro_from_moments(*basis, moments(*basis, w));
    EXPECT_GT(m.rho, 0.0);
    EXPECT_GT(m.theta, 0.0);
  }
  const auto grid2 = grid_2d(6, -4.0, 4.0);
  const auto basis2 = build_basis(grid2, 3);
  for (int trial = 0; trial < 50; ++trial) {
    WeightVector h1(grid2->size());
    WeightVector h2(grid2->size());
    for (Eigen::Index i = 0; i < h1.size(); ++i) {
      h1[i] = u(rng);
      h2[i] = u(rng);
    }
    const MacroState m = macro_from_moments(*basis2, moments(*basis2, h1), moments(*basis2, h2));
    EXPECT_GT(m.rho, 0.0);
    EXPECT_GT(m.theta, 0.0);
  }
}

TEST(Maxwellian, PointValues) {
  const auto grid = grid_1d(3, -1.0, 1.0);  // middle node at 0
  const WeightVector w = maxwellian_values(*grid, MacroState{});
  EXPECT_NEAR(w[1], 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(w[1], 0.398942, 1e-6);
  const WeightVector w7 = maxwellian_values(*grid, MacroState{.rho = 7.0});
  EXPECT_NEAR(w7[1], 2.79259, 1e-5);

  const auto grid2 = grid_2d(3, -1.0, 1.0);  // center node at (0, 0), index 4
  for (double theta : {0.3, 1.0, 2.5}) {
    const WeightVector h2 = maxwellian_values(*grid2, MacroState{.theta = theta}, MaxwellianVariant::kH2);
    EXPECT_NEAR(h2[4], 1.0 / (2.0 * std::numbers::pi), 1e-15);
  }
}

TEST(Maxwellian, ReducedPairMoments) {
  const MacroState macro{.rho = 1.3, .v = {0.4, -0.2}, .theta = 0.9};
  const auto grid = grid_2d(40, -7.0, 7.0);
  const auto basis = build_basis(grid, 3);
  const MacroState back = macro_from_moments(*basis, moments(*basis, maxwellian_values(*grid, macro, MaxwellianVariant::kH1)),
                                             moments(*basis, maxwellian_values(*grid, macro, MaxwellianVariant::kH2)));
  EXPECT_NEAR(back.rho, macro.rho, 1e-10);
  EXPECT_NEAR(back.v[0], macro.v[0], 1e-10);
  EXPECT_NEAR(back.v[1], macro.v[1], 1e-10);
  EXPECT_NEAR(back.theta, macro.theta, 1e-10);
}

TEST(Maxwellian, VariantMismatchThrows) {
  EXPECT_THROW(maxwellian_values(*grid_1d(4, -1.0, 1.0), MacroState{}, MaxwellianVariant::kH1), InvalidArgument);
  EXPECT_THROW(maxwellian_values(*grid_2d(4, -1.0, 1.0), MacroState{}), InvalidArgument);
  EXPECT_THROW(maxwellian_values(*grid_1d(4, -1.0, 1.0), MacroState{.theta = 0.0}), NonPhysicalState);
}

}  // namespace
}  // namespace posmom
