#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "posmom/basis.hpp"
#include "posmom/closure_entropy.hpp"
#include "posmom/errors.hpp"

namespace posmom {
namespace {

using Eigen::VectorXd;

VelocityGrid grid_1d(int n, double lo, double hi) { return VelocityGrid(gauss_legendre(n, lo, hi), 1); }

VectorXd discrete_conserved(const VelocityGrid& grid, const VectorXd& w) {
  const auto& xi = grid.component(0).array();
  const auto& om = grid.weights().array();
  return Eigen::Vector3d((om * w.array()).sum(), (om * w.array() * xi).sum(), (om * w.array() * xi.square()).sum());
}

TEST(DiscreteMaxwellian, StandardMaxwellianIsNearlyItsOwnMinimizer) {
  const VelocityGrid grid = grid_1d(40, -7.0, 7.0);
  const VectorXd f = maxwellian_values(grid, MacroState{});
  const VectorXd target = discrete_conserved(grid, f);
  const EntropySolution s = discrete_maxwellian(grid, target);
  EXPECT_LE((s.W - f).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(s.constraint_residual, 1e-8);
  EXPECT_LE((discrete_conserved(grid, s.W) - target).cwiseAbs().maxCoeff(), 1e-8 * target.cwiseAbs().maxCoeff());

  // Exponential family: log W is exactly the quadratic alpha^T (1, xi, xi^2).
  const auto& xi = grid.component(0).array();
  const VectorXd log_model = (s.alpha[0] + s.alpha[1] * xi + s.alpha[2] * xi.square()).matrix();
  EXPECT_LE((s.W.array().log().matrix() - log_model).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GT(s.W.minCoeff(), 0.0);
}

TEST(DiscreteMaxwellian, LinearInDensity) {
  const VelocityGrid grid = grid_1d(40, -7.0, 7.0);
  const EntropySolution one = discrete_maxwellian(grid, conserved_from_macro(MacroState{}, 1));
  const EntropySolution two = discrete_maxwellian(grid, conserved_from_macro(MacroState{.rho = 2.0}, 1));
  EXPECT_LE((two.W - 2.0 * one.W).cwiseAbs().maxCoeff(), 1e-10 * two.W.maxCoeff());
}

TEST(DiscreteMaxwellian, VelocityOutsideTheBoxFailsLoudly) {
  const VelocityGrid grid = grid_1d(40, -7.0, 7.0);
  const VectorXd target = conserved_from_macro(MacroState{.v = {10.0, 0.0}}, 1);
  EXPECT_THROW(discrete_maxwellian(grid, target), EntropyFailure);
}

TEST(DiscreteMaxwellian, NonPhysicalInputRejected) {
  const VelocityGrid grid = grid_1d(20, -7.0, 7.0);
  EXPECT_THROW(discrete_maxwellian(grid, Eigen::Vector3d(-1.0, 0.0, 1.0)), NonPhysicalState);
  EXPECT_THROW(discrete_maxwellian(grid, Eigen::Vector3d(1.0, 1.0, 0.5)), NonPhysicalState);
  EXPECT_THROW(discrete_maxwellian(grid, Eigen::Vector2d(1.0, 1.0)), InvalidArgument);
}

TEST(DiscreteMaxwellian, ShiftCovariance) {
  const double shift = 2.0;
  const VelocityGrid a = grid_1d(30, -7.0, 7.0);
  const VelocityGrid b = grid_1d(30, -7.0 + shift, 7.0 + shift);
  const MacroState m{.rho = 1.4, .v = {0.3, 0.0}, .theta = 1.7};
  MacroState shifted = m;
  shifted.v[0] += shift;
  // Targets are the discrete moments of a sampled pdf, so both problems are
  // exactly the same up to relabeling the nodes.
  const VectorXd fa = maxwellian_values(a, MacroState{.rho = 1.4, .v = {0.5, 0.0}, .theta = 1.2});
  const VectorXd fb = maxwellian_values(b, MacroState{.rho = 1.4, .v = {0.5 + shift, 0.0}, .theta = 1.2});
  const EntropySolution sa = discrete_maxwellian(a, discrete_conserved(a, fa));
  const EntropySolution sb = discrete_maxwellian(b, discrete_conserved(b, fb));
  EXPECT_LE((sa.W - sb.W).cwiseAbs().maxCoeff(), 1e-10 * sa.W.maxCoeff());
  const EntropySolution ma = discrete_maxwellian(a, conserved_from_macro(m, 1));
  const EntropySolution mb = discrete_maxwellian(b, conserved_from_macro(shifted, 1));
  EXPECT_LE((ma.W - mb.W).cwiseAbs().maxCoeff(), 1e-10 * ma.W.maxCoeff());
}

TEST(DiscreteMaxwellian, NearBoxEdgeStillConverges) {
  const VelocityGrid grid = grid_1d(50, -5.0, 5.0);
  const VectorXd target = conserved_from_macro(MacroState{.rho = 0.3, .v = {2.5, 0.0}, .theta = 0.6}, 1);
  const EntropySolution s = discrete_maxwellian(grid, target);
  EXPECT_LE(s.constraint_residual, 1e-8);
  EXPECT_LE((discrete_conserved(grid, s.W) - target).cwiseAbs().maxCoeff(), 1e-8 * target.cwiseAbs().maxCoeff());
}

TEST(DiscreteMaxwellian, TwoDPairMatchesConservedMoments) {
  const auto grid = std::make_shared<const VelocityGrid>(gauss_legendre(30, -7.0, 7.0), 2);
  const auto basis = build_basis(grid, 3);
  const MacroState m{.rho = 1.5, .v = {0.4, -0.3}, .theta = 1.2};
  const VectorXd target = conserved_from_macro(m, 2);
  const EntropySolution s = discrete_maxwellian(*grid, target);
  ASSERT_EQ(s.W2.size(), grid->size());
  EXPECT_LE(s.constraint_residual, 1e-8);
  const VectorXd got = raw_conserved(*basis, moments(*basis, s.W), moments(*basis, s.W2));
  EXPECT_LE((got - target).cwiseAbs().maxCoeff(), 1e-8 * target.cwiseAbs().maxCoeff());
  // h2 = h1 / (-2 alpha_3), the reduced Maxwellian pair relation.
  EXPECT_LE((s.W2 - s.W / (-2.0 * s.alpha[3])).cwiseAbs().maxCoeff(), 1e-12 * s.W2.maxCoeff());
  // Close to the analytic reduced Maxwellians.
  EXPECT_LE((s.W - maxwellian_values(*grid, m, MaxwellianVariant::kH1)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((s.W2 - maxwellian_values(*grid, m, MaxwellianVariant::kH2)).cwiseAbs().maxCoeff(), 1e-6);
}

}  // namespace
}  // namespace posmom
