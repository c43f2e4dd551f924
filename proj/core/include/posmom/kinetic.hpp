#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "posmom/basis.hpp"
#include "posmom/closure_entropy.hpp"
#include "posmom/closure_l2.hpp"

namespace posmom {

/// Uniform Cartesian mesh. Cells are indexed i * ny + j; in 1D ny = 1.
struct Mesh {
  int dim = 1;
  int nx = 1;
  int ny = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};

  double dx() const { return (hi[0] - lo[0]) / nx; }
  double dy() const { return (hi[1] - lo[1]) / ny; }
  Eigen::Index cells() const { return static_cast<Eigen::Index>(nx) * ny; }
  Eigen::Index index(int i, int j = 0) const { return static_cast<Eigen::Index>(i) * ny + j; }
  double center(int axis, int i) const {
    const double h = axis == 0 ? dx() : dy();
    return lo[axis] + (i + 0.5) * h;
  }
};

Mesh make_mesh_1d(int nx, double lo, double hi);
Mesh make_mesh_2d(int nx, int ny, std::array<double, 2> lo, std::array<double, 2> hi);

/// Macroscopic state of the Maxwellian initial data at (x, y).
using InitialData = std::function<MacroState(double x, double y)>;

/// Time-independent inflow data, sampled once at the velocity nodes.
/// Sides are ordered x_lo, x_hi, y_lo, y_hi.
struct BoundaryData {
  std::array<MacroState, 4> inflow;
  std::array<WeightVector, 4> h1;  ///< ghost pdf (h1 in 2D)
  std::array<WeightVector, 4> h2;  ///< 2D only
};

BoundaryData make_boundary(const VelocityGrid& grid, const std::array<MacroState, 4>& inflow);

/// Moments of every cell; columns are cells.
struct FieldState {
  Mesh mesh;
  double time = 0.0;
  Eigen::MatrixXd h1;  ///< M x cells; the pdf in 1D
  Eigen::MatrixXd h2;  ///< M x cells in 2D, empty in 1D

  int pdf_count() const { return h2.size() == 0 ? 1 : 2; }
};

/// tau^{-1} = C rho theta^{1 - omega} / Kn.
double collision_frequency(const MacroState& macro, double kn, double c = 1.0, double omega = 1.0);

/// Implicit BGK relaxation: (lambda + r lambda_M) / (1 + r), r = dt / tau.
MomentVector collision_step(const MomentVector& lambda, const MomentVector& lambda_m, double dt, double tau);

enum class CflMode { kFeasibility, kStability };

/// Largest admissible time step. 1D: feasibility dx / max|xi|, stability half
/// of that; 2D: a half and a quarter.
double cfl_dt(double dx, const VelocityGrid& grid, CflMode mode, double safety = 1.0);

/// Kinetic upwind flux F(W1, W2) = 1/2 (AL(Xi - |Xi|) W1 + AL(Xi + |Xi|) W2)
/// along one axis. W2 is the state on the low side of the face.
class FluxOperator {
 public:
  FluxOperator() = default;
  FluxOperator(const MomentBasis& basis, int axis);

  const Eigen::MatrixXd& minus() const { return minus_; }  ///< 1/2 AL (Xi - |Xi|)
  const Eigen::MatrixXd& plus() const { return plus_; }    ///< 1/2 AL (Xi + |Xi|)
  MomentVector operator()(const WeightVector& w1, const WeightVector& w2) const;

 private:
  Eigen::MatrixXd minus_;
  Eigen::MatrixXd plus_;
};

MomentVector kinetic_flux(const MomentBasis& basis, const WeightVector& w1, const WeightVector& w2, int axis = 0);

/// Cell averages of the sampled Maxwellian initial data, by `points` Gauss
/// points per cell and dimension. Returns node values, N x cells (h1 or h2).
Eigen::MatrixXd cell_average_weights(const VelocityGrid& grid, const Mesh& mesh, const InitialData& initial,
                                     MaxwellianVariant variant, int points = 10);

/// Moment field of the cell-averaged initial data.
FieldState initialize(const MomentBasis& basis, const Mesh& mesh, const InitialData& initial, int points = 10);

/// Singular values of A sqrt(L).
struct EnergyConstants {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double kappa = 0.0;
};

EnergyConstants energy_constants(const MomentBasis& basis);

/// Terms of the L2 energy bound E_{k+1} <= B_k + B_M + B_in.
struct EnergyTerms {
  double E = 0.0;  ///< sum over cells (and pdfs) of ||lambda||^2
  double B_k = 0.0;
  double B_M = 0.0;
  double B_in = 0.0;
};

/// Discrete boundary seminorm |f_in|^2 over the inflow faces: each face
/// contributes sum_{xi.n <= 0} |xi.n| f_in(xi)^2 omega.
double boundary_seminorm_sq(const VelocityGrid& grid, const Mesh& mesh, const BoundaryData& boundary);

/// Bound terms for one step from t with per-cell relaxation times `tau`.
/// B_M saturates at the largest double when N^3 exp(2 N t) overflows.
EnergyTerms l2_energy_bound_terms(const MomentBasis& basis, const EnergyConstants& constants, const FieldState& state,
                                  double dt, const std::vector<double>& tau, double boundary_seminorm);

enum class GhostMode {
  /// Ghost cells carry the inflow Maxwellian sampled at the nodes.
  kSampled,
  /// Ghost cells carry the closure of the sampled Maxwellian's moments, so
  /// a uniform state matching the inflow is an exact steady state.
  kClosure,
};

struct KineticConfig {
  double kn = 0.1;
  double c_coll = 1.0;
  double omega = 1.0;
  double t_end = 0.0;
  double dt = 0.0;  ///< 0 selects cfl_dt(cfl_mode, cfl_safety)
  CflMode cfl_mode = CflMode::kStability;
  double cfl_safety = 1.0;
  /// Accept a dt above the feasibility limit instead of throwing.
  bool allow_unsafe_dt = false;
  GhostMode ghosts = GhostMode::kSampled;
  ClosureOptions closure{.method = ClosureMethod::kAuto};
  EntropyOptions entropy;
  std::vector<double> output_times;  ///< snapshots; t_end is always included
  long max_steps = -1;               ///< stop early after this many steps (tests)
};

struct StepDiagnostics {
  long step = 0;
  double t = 0.0;  ///< time after the step
  double dt = 0.0;
  EnergyTerms energy;     ///< B terms from the step's start, E after it
  bool energy_bound_held = true;
  double min_weight = 0.0;
  double qp_iterations_mean = 0.0;
  long qp_fallbacks = 0;
  double entropy_iterations_mean = 0.0;
  /// Net moments entering through the boundary, summed over pdfs' own rows:
  /// sum_i lambda^{k+1} = sum_i lambda^{k*} + boundary_inflow.
  Eigen::MatrixXd boundary_inflow;  ///< M x pdfs
};

struct PhaseTimings {
  double entropy = 0.0;
  double collision = 0.0;
  double closure = 0.0;
  double transport = 0.0;
};

struct EvolveResult {
  FieldState final_state;
  std::vector<FieldState> snapshots;
  std::vector<StepDiagnostics> trace;
  EnergyConstants constants;
  PhaseTimings timings;
  bool energy_bound_held = true;
};

using StepObserver = std::function<void(const FieldState&, const StepDiagnostics&)>;

/// Four-step evolution: entropy minimization, implicit collision, closure,
/// upwind transport. Holds per-cell warm starts between steps, so one
/// instance drives one trajectory at a time.
class KineticSolver {
 public:
  KineticSolver(std::shared_ptr<const MomentBasis> basis, BoundaryData boundary, KineticConfig config);

  const MomentBasis& basis() const { return *basis_; }
  const KineticConfig& config() const { return config_; }
  const EnergyConstants& constants() const { return constants_; }
  const BoundaryData& boundary() const { return boundary_; }

  FieldState initialize(const Mesh& mesh, const InitialData& initial) const;

  /// Time step used by evolve() for this mesh.
  double time_step(const Mesh& mesh) const;

  /// One full step of size dt, in place.
  StepDiagnostics step(FieldState& state, double dt, long step_index = 0);

  /// Transport only, with the given node values per cell (N x cells per pdf).
  /// Returns the net boundary inflow (M x pdfs).
  Eigen::MatrixXd transport(FieldState& state, const std::array<Eigen::MatrixXd, 2>& weights, double dt) const;

  EvolveResult evolve(FieldState initial, const StepObserver& observer = {});

  const PhaseTimings& timings() const { return timings_; }

 private:
  void prepare(const Mesh& mesh);

  std::shared_ptr<const MomentBasis> basis_;
  PositiveL2Closure closure_;
  BoundaryData boundary_;
  KineticConfig config_;
  EnergyConstants constants_;
  std::array<FluxOperator, 2> flux_;
  std::array<std::vector<Eigen::VectorXd>, 2> duals_;
  PhaseTimings timings_;
  double boundary_norm_ = -1.0;
  Mesh prepared_mesh_;
};

/// Raw conserved moments per cell, (dim + 2) x cells.
Eigen::MatrixXd conserved_field(const MomentBasis& basis, const FieldState& state);

/// Macroscopic fields per cell.
std::vector<MacroState> macro_field(const MomentBasis& basis, const FieldState& state);

}  // namespace posmom
