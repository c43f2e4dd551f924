#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "posmom/basis.hpp"
#include "posmom/kinetic.hpp"

namespace posmom {

enum class CaseId { kBimodal, kSod, kTwoBeam, kBubble2d };

const char* to_string(CaseId id);
CaseId parse_case_id(const std::string& name);

/// Two-Gaussian velocity pdf used by the closure study.
struct BimodalParams {
  double theta0 = 3.0;
  double u0 = -4.0;
  double theta1 = 4.0;
  double u1 = 5.0;

  double operator()(double xi) const;
};

struct BubbleParams {
  double rho0 = 1.0;
  double amplitude = 1.0;
  double sharpness = 100.0;
  std::array<double, 2> center{1.0, 1.0};
};

/// One of the four test problems with its default discretization.
struct CaseSpec {
  CaseId id = CaseId::kSod;
  int dim = 1;
  std::array<double, 2> lo{-2.0, 0.0};  ///< spatial domain
  std::array<double, 2> hi{2.0, 1.0};
  double t_end = 0.3;
  double kn = 0.1;

  // Piecewise 1D data: state for x <= 0 and x > 0.
  MacroState left;
  MacroState right;
  BubbleParams bubble;
  BimodalParams bimodal;

  /// Inflow Maxwellians, sides x_lo, x_hi, y_lo, y_hi.
  std::array<MacroState, 4> inflow;

  // Default discretization.
  int moments = 5;  ///< M
  int nodes = 30;   ///< N per velocity axis
  int reference_nodes = 350;  ///< N of the reference DVM
  int nx = 1000;
  int ny = 1;
  VelocityBox box{-7.0, 7.0};
  /// dt = dt_factor * dx / max|xi|; 0 selects the stability CFL.
  double dt_factor = 0.0;

  /// Macro state at (x, y); throws for the bimodal case.
  MacroState initial_state(double x, double y = 0.0) const;
  InitialData initial_data() const;
  Mesh mesh() const;
};

/// Defaults for a named case, then `overrides` applied (see apply_overrides).
CaseSpec make_case(const std::string& name, const std::map<std::string, std::string>& overrides = {});

/// Keys: kn, t_end, M, N, N_ref, nx, ny, box.lo, box.hi, dt_factor, x.lo, x.hi,
/// y.lo, y.hi, bubble.{rho0,amplitude,sharpness,cx,cy},
/// bimodal.{theta0,u0,theta1,u1}. Unknown keys throw ConfigurationError.
void apply_overrides(CaseSpec& spec, const std::map<std::string, std::string>& overrides);

/// The case's parameters as key=value pairs accepted by apply_overrides.
std::map<std::string, std::string> to_config(const CaseSpec& spec);

/// Velocity grid for the case's box with `nodes` Gauss-Legendre points per
/// axis.
std::shared_ptr<const VelocityGrid> make_grid(const CaseSpec& spec, int nodes, VelocityBox box);
BoundaryData make_boundary(const CaseSpec& spec, const VelocityGrid& grid);

/// dt_factor * min(dx, dy) / (box edge speed), or 0 when dt_factor is 0.
double case_time_step(const CaseSpec& spec, const VelocityGrid& grid);

/// Velocity cutoff [inf(v - c sqrt(theta)), sup(v + c sqrt(theta))] per axis
/// over the sampled states.
std::array<VelocityBox, 2> velocity_cutoff(const std::vector<MacroState>& samples, int dim, double c = 3.5);
/// Cutoff over the initial data sampled at cell centers and the inflow states.
std::array<VelocityBox, 2> velocity_cutoff(const CaseSpec& spec, double c = 3.5);

/// |<xi^M (f_M - f)> / <xi^M f>| on the grid, M = basis order.
double error_highest_moment(const MomentBasis& basis, const WeightVector& f, const WeightVector& f_m);

/// Quadrature-weighted relative L2 error of node values.
double relative_l2_node_error(const VelocityGrid& grid, const WeightVector& f, const WeightVector& approx);

struct ErrorReport {
  std::string metric;
  double value = 0.0;
};

/// Relative spatial L2 errors of `approx` against `reference` on the same
/// mesh: E_cons over the raw conserved moments, then rho, v (per axis) and
/// theta individually. Inputs are (dim + 2) x cells raw conserved fields.
std::vector<ErrorReport> error_macro(const Mesh& mesh, const Eigen::MatrixXd& approx, const Eigen::MatrixXd& reference);

/// Block averages of a cell field onto a coarser mesh whose cell counts
/// divide the fine ones. Columns are cells.
Eigen::MatrixXd restrict_field(const Mesh& fine, const Eigen::MatrixXd& field, const Mesh& coarse);

/// Relative spatial L2 error of two conserved fields.
double error_conserved(const Mesh& mesh, const Eigen::MatrixXd& approx, const Eigen::MatrixXd& reference);

}  // namespace posmom
