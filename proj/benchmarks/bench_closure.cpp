#include <benchmark/benchmark.h>

#include "posmom/cases.hpp"
#include "posmom/closure_entropy.hpp"
#include "posmom/closure_l2.hpp"
#include "posmom/kinetic.hpp"

namespace posmom {
namespace {

Eigen::VectorXd bimodal_moments(const MomentBasis& basis) {
  const BimodalParams p;
  Eigen::VectorXd f(basis.node_count());
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = p(basis.Xi(0)[i]);
  return basis.AL() * f;
}

void BM_ClosureInteriorPoint(benchmark::State& state) {
  const auto grid = std::make_shared<const VelocityGrid>(gauss_legendre(40, -20.0, 20.0), 1);
  const auto basis = build_basis(grid, static_cast<int>(state.range(0)));
  const PositiveL2Closure closure(basis, {.method = ClosureMethod::kInteriorPoint});
  const Eigen::VectorXd lambda = bimodal_moments(*basis);
  for (auto _ : state) benchmark::DoNotOptimize(closure.solve(lambda));
}
BENCHMARK(BM_ClosureInteriorPoint)->Arg(4)->Arg(10)->Arg(22);

void BM_ClosureWarmAuto(benchmark::State& state) {
  const auto grid = std::make_shared<const VelocityGrid>(gauss_legendre(30, -7.0, 7.0), 1);
  const auto basis = build_basis(grid, static_cast<int>(state.range(0)));
  const PositiveL2Closure closure(basis, {.method = ClosureMethod::kAuto});
  const Eigen::VectorXd a = basis->AL() * maxwellian_values(*grid, MacroState{.rho = 2.0, .v = {0.3, 0.0}, .theta = 1.2});
  const Eigen::VectorXd b = basis->AL() * maxwellian_values(*grid, MacroState{.rho = 2.1, .v = {0.31, 0.0}, .theta = 1.2});
  const ClosureSolution seed = closure.solve(a);
  for (auto _ : state) benchmark::DoNotOptimize(closure.solve(b, WarmStart{seed.dual, seed.W}));
}
BENCHMARK(BM_ClosureWarmAuto)->Arg(4)->Arg(10);

void BM_DiscreteMaxwellian(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto grid = std::make_shared<const VelocityGrid>(gauss_legendre(dim == 1 ? 350 : 40, -7.0, 7.0), dim);
  Eigen::VectorXd target(dim + 2);
  if (dim == 1) target << 2.0, 0.6, 2.0 * (1.2 + 0.09);
  else target << 2.0, 0.6, -0.2, 2.0 * (3.6 + 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(discrete_maxwellian(*grid, target));
}
BENCHMARK(BM_DiscreteMaxwellian)->Arg(1)->Arg(2);

void BM_KineticStepSod(benchmark::State& state) {
  const CaseSpec sod = make_case("sod", {{"nx", "200"}});
  const auto grid = make_grid(sod, sod.nodes, sod.box);
  const auto basis = build_basis(grid, static_cast<int>(state.range(0)));
  KineticSolver solver(basis, make_boundary(sod, *grid), KineticConfig{.kn = sod.kn, .t_end = sod.t_end});
  const FieldState initial = solver.initialize(sod.mesh(), sod.initial_data());
  const double dt = solver.time_step(initial.mesh);
  FieldState field = initial;
  long k = 0;
  for (auto _ : state) {
    if (k % 100 == 0) field = initial;
    benchmark::DoNotOptimize(solver.step(field, dt, k++));
  }
  state.SetItemsProcessed(state.iterations() * sod.nx);
}
BENCHMARK(BM_KineticStepSod)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace posmom

BENCHMARK_MAIN();
