#include <array>
#include <cmath>
#include <tuple>

#include <gtest/gtest.h>

#include "posmom/cases.hpp"
#include "posmom/dvm.hpp"
#include "posmom/errors.hpp"

namespace posmom {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(Dvm, UniformEquilibriumIsSteady) {
  const auto grid = std::make_shared<const VelocityGrid>(gauss_legendre(40, -7.0, 7.0), 1);
  const MacroState m{.rho = 1.0, .v = {0.0, 0.0}, .theta = 1.0};
  const DvmSolver solver(grid, make_boundary(*grid, {m, m, m, m}), DvmConfig{.kn = 0.1, .t_end = 1.0, .max_steps = 50});
  const Mesh mesh = make_mesh_1d(20, 0.0, 1.0);
  DvmState init = dvm_initialize(*grid, mesh, [&](double, double) { return m; });
  const MatrixXd start = init.h1;
  const DvmResult r = solver.evolve(std::move(init));
  EXPECT_LE((r.final_state.h1 - start).cwiseAbs().maxCoeff(), 1e-10);
}

// Positive-velocity grid with negligible collisions: each node follows the
// scalar upwind update.
TEST(Dvm, PureAdvectionIsScalarUpwind) {
  const auto grid = std::make_shared<const VelocityGrid>(gauss_legendre(10, 0.5, 1.5), 1);
  const MacroState in{.rho = 1.0, .v = {1.0, 0.0}, .theta = 0.05};
  const DvmSolver solver(grid, make_boundary(*grid, {in, in, in, in}), DvmConfig{.kn = 1e14, .t_end = 1.0});
  const Mesh mesh = make_mesh_1d(10, 0.0, 1.0);
  DvmState state = dvm_initialize(*grid, mesh, [](double x, double) {
    return MacroState{.rho = 1.0 + 0.5 * std::sin(6.0 * x), .v = {1.0, 0.0}, .theta = 0.05};
  });
  const MatrixXd w = state.h1;
  const double dt = 0.04;
  const double ratio = dt / mesh.dx();
  solver.step(state, dt);
  const VectorXd& xi = grid->component(0);
  const VectorXd ghost = maxwellian_values(*grid, in);
  for (int i = 0; i < mesh.nx; ++i) {
    const VectorXd upwind = i > 0 ? VectorXd(w.col(i - 1)) : ghost;
    const VectorXd expected = w.col(i) - ratio * xi.cwiseProduct(w.col(i) - upwind);
    EXPECT_LE((state.h1.col(i) - expected).cwiseAbs().maxCoeff(), 1e-10) << "cell " << i;
  }
}

TEST(Dvm, SodMassChangeEqualsBoundaryFlux) {
  const CaseSpec sod = make_case("sod", {{"nx", "200"}});
  const auto grid = make_grid(sod, 100, sod.box);
  const DvmSolver solver(grid, make_boundary(sod, *grid), DvmConfig{.kn = 0.1, .t_end = sod.t_end});
  const Mesh mesh = sod.mesh();
  DvmState state = dvm_initialize(*grid, mesh, sod.initial_data());
  const double dt = solver.time_step(mesh);
  const auto totals = [&]() -> VectorXd { return conserved_field(*grid, state).rowwise().sum(); };
  VectorXd expected = totals();
  for (int k = 0; k < 10; ++k) {
    const DvmStepDiagnostics d = solver.step(state, dt, k);
    EXPECT_GE(d.min_weight, 0.0);
    const VectorXd& xi = grid->component(0);
    const VectorXd& om = grid->weights();
    const VectorXd& b = d.boundary_inflow.col(0);
    expected[0] += om.dot(b);
    expected[1] += om.dot(xi.cwiseProduct(b));
    expected[2] += om.dot(xi.cwiseProduct(xi).cwiseProduct(b));
  }
  const VectorXd got = totals();
  EXPECT_NEAR(got[0], expected[0], 1e-10 * expected[0]);
  EXPECT_NEAR(got[2], expected[2], 1e-8 * expected[2]);
  EXPECT_NEAR(got[1], expected[1], 1e-8 * expected[2]);
}

TEST(Dvm, OversizedStepThrows) {
  const CaseSpec sod = make_case("sod", {{"nx", "100"}});
  const auto grid = make_grid(sod, 60, sod.box);
  const Mesh mesh = sod.mesh();
  const double limit = cfl_dt(mesh.dx(), *grid, CflMode::kFeasibility);
  DvmConfig config{.kn = 0.1, .t_end = sod.t_end, .dt = 3.0 * limit};
  EXPECT_THROW(DvmSolver(grid, make_boundary(sod, *grid), config).evolve(dvm_initialize(*grid, mesh, sod.initial_data())),
               CflViolation);
  config.allow_unsafe_dt = true;
  const DvmSolver unsafe(grid, make_boundary(sod, *grid), config);
  EXPECT_THROW(unsafe.evolve(dvm_initialize(*grid, mesh, sod.initial_data())), CflViolation);
}

TEST(Dvm, WeightsStayNonNegativeUnderFeasibilityCfl) {
  const CaseSpec beams = make_case("two-beam", {{"nx", "100"}});
  const auto grid = make_grid(beams, 80, beams.box);
  // Explicit relaxation shares the upwind budget 1 - nu with dt / tau.
  const std::array<std::tuple<double, double, DvmCollision>, 2> runs{
      {{0.1, 0.8, DvmCollision::kExplicit}, {0.01, 1.0, DvmCollision::kImplicitSplit}}};
  for (const auto& [kn, safety, collision] : runs) {
    const DvmConfig config{.kn = kn, .t_end = beams.t_end, .cfl_mode = CflMode::kFeasibility, .cfl_safety = safety,
                           .collision = collision};
    const DvmSolver solver(grid, make_boundary(beams, *grid), config);
    double min_weight = 1.0;
    solver.evolve(dvm_initialize(*grid, beams.mesh(), beams.initial_data()),
                  [&](const DvmState&, const DvmStepDiagnostics& d) { min_weight = std::min(min_weight, d.min_weight); });
    EXPECT_GE(min_weight, 0.0);
  }
}

// With as many moments as nodes the closure is the inverse of A L, so the
// moment scheme is the DVM in disguise.
TEST(Dvm, SquareMomentSystemReproducesTheDvm) {
  const CaseSpec sod = make_case("sod", {{"nx", "50"}});
  const auto grid = make_grid(sod, 8, VelocityBox{-5.0, 5.0});
  const auto basis = build_basis(grid, 8, {.allow_square = true});
  const Mesh mesh = sod.mesh();
  const BoundaryData boundary = make_boundary(sod, *grid);
  const double dt = cfl_dt(mesh.dx(), *grid, CflMode::kStability);

  KineticSolver moments_solver(basis, boundary, KineticConfig{.kn = 0.1, .t_end = 1.0});
  const DvmSolver dvm(grid, boundary, DvmConfig{.kn = 0.1, .t_end = 1.0, .collision = DvmCollision::kImplicitSplit});
  FieldState fs = moments_solver.initialize(mesh, sod.initial_data());
  DvmState ds = dvm_initialize(*grid, mesh, sod.initial_data());
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    moments_solver.step(fs, dt, k);
    dvm.step(ds, dt, k);
    const MatrixXd mapped = basis->AL() * ds.h1;
    worst = std::max(worst, (fs.h1 - mapped).cwiseAbs().maxCoeff() / mapped.cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(Dvm, TwoDConservesMassUpToBoundaryFlux) {
  const CaseSpec bubble = make_case("bubble2d", {{"nx", "8"}, {"ny", "8"}});
  const auto grid = make_grid(bubble, 16, bubble.box);
  const DvmSolver solver(grid, make_boundary(bubble, *grid), DvmConfig{.kn = bubble.kn, .t_end = bubble.t_end});
  const Mesh mesh = bubble.mesh();
  DvmState state = dvm_initialize(*grid, mesh, bubble.initial_data());
  const double dt = solver.time_step(mesh);
  double expected = conserved_field(*grid, state).row(0).sum();
  for (int k = 0; k < 5; ++k) {
    const DvmStepDiagnostics d = solver.step(state, dt, k);
    expected += grid->weights().dot(d.boundary_inflow.col(0));
    EXPECT_GE(d.min_weight, 0.0);
  }
  EXPECT_NEAR(conserved_field(*grid, state).row(0).sum(), expected, 1e-10 * expected);
}

TEST(Refinement, ScheduleAndWidening) {
  CaseSpec sod = make_case("sod", {{"t_end", "0.02"}});
  RefinementOptions options{.tolerance = 1e-300, .n_start = 10, .n_step = 10, .n_max = 30, .widen = 0.5,
                            .max_half_width = 4.5, .nx = 20};
  std::vector<RefinementCycle> seen;
  const RefinementOutcome out = refine_reference(sod, options, [&](const RefinementCycle& c) { seen.push_back(c); });
  EXPECT_FALSE(out.converged);
  ASSERT_EQ(seen.size(), 9u);  // boxes 3.5, 4.0, 4.5 with N = 10, 20, 30 each
  EXPECT_NEAR(seen.front().box.lo, -3.5, 1e-12);
  EXPECT_NEAR(seen.front().box.hi, 3.5, 1e-12);
  EXPECT_NEAR(seen.back().box.hi, 4.5, 1e-12);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    EXPECT_EQ(seen[i].nodes, 10 + 10 * static_cast<int>(i % 3));
    EXPECT_EQ(std::isnan(seen[i].delta), i % 3 == 0);
  }
  EXPECT_EQ(out.nodes, 30);
  EXPECT_EQ(out.solution.mesh.nx, 20);
}

TEST(Refinement, StopsOnceTotalsSettle) {
  CaseSpec sod = make_case("sod", {{"t_end", "0.02"}});
  RefinementOptions options{.tolerance = 1e-3, .n_start = 20, .n_step = 20, .n_max = 100, .nx = 20};
  const RefinementOutcome out = refine_reference(sod, options);
  EXPECT_TRUE(out.converged);
  EXPECT_LT(out.cycles.back().delta, 1e-3);
  EXPECT_THROW(refine_reference(make_case("bimodal")), ConfigurationError);
}

}  // namespace
}  // namespace posmom
