#include <cmath>

#include <gtest/gtest.h>

#include "posmom/cases.hpp"
#include "posmom/closure_l2.hpp"
#include "posmom/errors.hpp"

namespace posmom {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(Cases, DefaultStates) {
  const CaseSpec sod = make_case("sod");
  EXPECT_EQ(sod.dim, 1);
  EXPECT_DOUBLE_EQ(sod.initial_state(-0.5).rho, 7.0);
  EXPECT_DOUBLE_EQ(sod.initial_state(0.5).rho, 1.0);
  EXPECT_DOUBLE_EQ(sod.initial_state(-0.5).theta, 1.0);

  const CaseSpec beams = make_case("two-beam");
  EXPECT_DOUBLE_EQ(beams.initial_state(-0.5).v[0], 1.0);
  EXPECT_DOUBLE_EQ(beams.initial_state(0.5).v[0], -1.0);

  const CaseSpec bubble = make_case("bubble2d");
  EXPECT_EQ(bubble.dim, 2);
  EXPECT_NEAR(bubble.initial_state(1.0, 1.0).rho, 2.0, 1e-14);
  EXPECT_NEAR(bubble.initial_state(0.0, 0.0).rho, 1.0, 1e-12);

  EXPECT_THROW(make_case("bimodal").initial_state(0.0), ConfigurationError);
  EXPECT_THROW(make_case("shock-tube"), ConfigurationError);
}

TEST(Cases, OverridesAndRoundTrip) {
  const CaseSpec s = make_case("sod", {{"kn", "0.01"}, {"nx", "200"}, {"M", "4"}, {"box.lo", "-6"}, {"box.hi", "6"}});
  EXPECT_DOUBLE_EQ(s.kn, 0.01);
  EXPECT_EQ(s.nx, 200);
  EXPECT_EQ(s.moments, 4);
  EXPECT_DOUBLE_EQ(s.box.lo, -6.0);
  EXPECT_EQ(s.mesh().nx, 200);
  EXPECT_THROW(make_case("sod", {{"colour", "red"}}), ConfigurationError);
  EXPECT_THROW(make_case("sod", {{"kn", "fast"}}), ConfigurationError);

  const CaseSpec again = make_case("sod", to_config(s));
  EXPECT_EQ(to_config(again), to_config(s));
}

TEST(Cutoff, CaseBoxes) {
  const auto sod = velocity_cutoff(make_case("sod"));
  EXPECT_NEAR(sod[0].lo, -3.5, 1e-12);
  EXPECT_NEAR(sod[0].hi, 3.5, 1e-12);
  const auto beams = velocity_cutoff(make_case("two-beam"));
  EXPECT_NEAR(beams[0].lo, -4.5, 1e-12);
  EXPECT_NEAR(beams[0].hi, 4.5, 1e-12);
  const auto narrow = velocity_cutoff({MacroState{}}, 1, 3.0);
  EXPECT_NEAR(narrow[0].lo, -3.0, 1e-12);
  EXPECT_NEAR(narrow[0].hi, 3.0, 1e-12);

  double previous = 0.0;
  for (double c : {1.0, 2.0, 3.5, 5.0}) {
    const double width = velocity_cutoff(make_case("two-beam"), c)[0].half_width();
    EXPECT_GT(width, previous);
    previous = width;
  }
}

TEST(Errors, HighestMomentError) {
  const auto grid = std::make_shared<const VelocityGrid>(gauss_legendre(20, -5.0, 5.0), 1);
  const auto basis = build_basis(grid, 4);
  const VectorXd f = maxwellian_values(*grid, MacroState{});
  EXPECT_EQ(error_highest_moment(*basis, f, f), 0.0);
  EXPECT_NEAR(error_highest_moment(*basis, f, 1.1 * f), 0.1, 1e-12);
  EXPECT_THROW(error_highest_moment(*basis, VectorXd::Zero(20), f), InvalidArgument);
  EXPECT_NEAR(relative_l2_node_error(*grid, f, 0.5 * f), 0.5, 1e-12);
}

TEST(Errors, MacroErrorsAndRestriction) {
  const Mesh fine = make_mesh_1d(8, 0.0, 1.0);
  const Mesh coarse = make_mesh_1d(4, 0.0, 1.0);
  MatrixXd field(3, 8);
  for (int i = 0; i < 8; ++i) field.col(i) << 1.0 + i, 0.1 * i, 2.0 + i;
  const MatrixXd r = restrict_field(fine, field, coarse);
  ASSERT_EQ(r.cols(), 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r(0, i), 0.5 * (field(0, 2 * i) + field(0, 2 * i + 1)), 1e-15);
  EXPECT_THROW(restrict_field(fine, field, make_mesh_1d(3, 0.0, 1.0)), InvalidArgument);

  for (const ErrorReport& e : error_macro(fine, field, field)) EXPECT_EQ(e.value, 0.0) << e.metric;
  const auto reports = error_macro(fine, 1.01 * field, field);
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[0].metric, "E_cons");
  EXPECT_NEAR(reports[0].value, 0.01, 1e-12);
  EXPECT_NEAR(error_conserved(fine, 1.01 * field, field), 0.01, 1e-12);

  const Mesh fine2 = make_mesh_2d(4, 4, {0.0, 0.0}, {2.0, 2.0});
  const Mesh coarse2 = make_mesh_2d(2, 2, {0.0, 0.0}, {2.0, 2.0});
  const MatrixXd ones = MatrixXd::Ones(4, 16);
  EXPECT_LE((restrict_field(fine2, ones, coarse2) - MatrixXd::Ones(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(error_macro(fine2, ones, ones).size(), 5u);
}

TEST(Cases, InitialMomentsAreRealizable) {
  for (const char* name : {"sod", "two-beam"}) {
    const CaseSpec spec = make_case(name, {{"nx", "50"}});
    const auto basis = build_basis(make_grid(spec, spec.nodes, spec.box), spec.moments);
    const PositiveL2Closure closure(basis);
    const FieldState init = initialize(*basis, spec.mesh(), spec.initial_data());
    for (Eigen::Index c = 0; c < init.h1.cols(); ++c) {
      EXPECT_TRUE(closure.check_realizability(init.h1.col(c)).realizable) << name << " cell " << c;
    }
  }
}

TEST(Cases, BoundaryAndTimeStep) {
  const CaseSpec sod = make_case("sod", {{"dt_factor", "0.5"}, {"nx", "100"}});
  const auto grid = make_grid(sod, 20, sod.box);
  EXPECT_NEAR(case_time_step(sod, *grid), 0.5 * sod.mesh().dx() / 7.0, 1e-15);
  EXPECT_EQ(case_time_step(make_case("sod", {{"dt_factor", "0"}}), *grid), 0.0);
  const BoundaryData b = make_boundary(sod, *grid);
  EXPECT_LE((b.h1[0] - maxwellian_values(*grid, sod.left)).cwiseAbs().maxCoeff(), 1e-14);
}

}  // namespace
}  // namespace posmom
