#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "posmom/quadrature.hpp"

namespace posmom {

/// Node values of a pdf, one entry per velocity grid point.
using WeightVector = Eigen::VectorXd;
/// Discrete moments A L W, stored in scaled velocity coordinates.
using MomentVector = Eigen::VectorXd;

/// Density, bulk velocity and temperature (energy units). In 1D only v[0]
/// is meaningful.
struct MacroState {
  double rho = 1.0;
  std::array<double, 2> v{0.0, 0.0};
  double theta = 1.0;
};

enum class MaxwellianVariant {
  kFull,  ///< 1D Maxwell-Boltzmann pdf
  kH1,    ///< 2D reduced pdf, xi_3-integrated
  kH2,    ///< 2D reduced pdf weighted by xi_3^2
};

struct BasisOptions {
  /// Permit order < 3 (no conserved-moment embedding). Test use only.
  bool allow_low_order = false;
  /// Permit node count == moment count (square A). Test use only.
  bool allow_square = false;
};

/// Monomial moment basis on a velocity grid.
///
/// Monomials are evaluated in scaled coordinates
///   xi_hat = (xi - center) / half_width
/// per axis, which keeps A well conditioned for high orders on wide boxes.
/// Every moment vector handled by the library uses these coordinates;
/// `to_raw()` gives the exact map back to moments of the raw monomials.
///
/// 1D: exponents 0, 1, ..., order-1.
/// 2D: all (a, b) with a + b <= order-1, ordered by total degree and then
///     by ascending b: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
class MomentBasis {
 public:
  MomentBasis(std::shared_ptr<const VelocityGrid> grid, int order, BasisOptions options = {});

  int dim() const { return grid_->dim(); }
  int order() const { return order_; }
  Eigen::Index moment_count() const { return static_cast<Eigen::Index>(exponents_.size()); }
  Eigen::Index node_count() const { return grid_->size(); }

  const VelocityGrid& grid() const { return *grid_; }
  const std::shared_ptr<const VelocityGrid>& grid_ptr() const { return grid_; }
  const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }

  /// M x N matrix of basis polynomials at the nodes.
  const Eigen::MatrixXd& A() const { return a_; }
  /// Diagonal of L (quadrature weights).
  const Eigen::VectorXd& L() const { return grid_->weights(); }
  /// Diagonal of Xi_d (node velocity component d).
  const Eigen::VectorXd& Xi(int axis) const { return grid_->component(axis); }
  /// A * diag(L), precomputed.
  const Eigen::MatrixXd& AL() const { return al_; }

  double center(int axis) const { return grid_->box(axis).center(); }
  double scale(int axis) const { return grid_->box(axis).half_width(); }

  /// Lower-triangular map T with raw = T * scaled, where raw_k is the
  /// moment against prod_d xi_d^{e_kd} in unscaled velocities.
  const Eigen::MatrixXd& to_raw() const { return to_raw_; }

  /// Index of the exponent tuple, or -1 when absent.
  Eigen::Index index_of(int a, int b = 0) const;

 private:
  std::shared_ptr<const VelocityGrid> grid_;
  int order_;
  std::vector<std::array<int, 2>> exponents_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd al_;
  Eigen::MatrixXd to_raw_;
};

/// Number of 2D monomials with total degree <= order - 1.
constexpr Eigen::Index moment_count_2d(int order) { return static_cast<Eigen::Index>(order) * (order + 1) / 2; }

std::shared_ptr<const MomentBasis> build_basis(std::shared_ptr<const VelocityGrid> grid, int order,
                                               BasisOptions options = {});

/// lambda = A L W.
MomentVector moments(const MomentBasis& basis, const WeightVector& w);

/// rho, v, theta from a 1D moment vector.
MacroState macro_from_moments(const MomentBasis& basis, const MomentVector& lambda);
/// rho, v, theta from the paired 2D reduced-pdf moments (h1, h2).
MacroState macro_from_moments(const MomentBasis& basis, const MomentVector& lambda_h1,
                              const MomentVector& lambda_h2);

/// Raw conserved moments: 1D (rho, rho v, rho (theta + v^2));
/// 2D (rho, rho v1, rho v2, <|xi|^2 h1> + <h2>).
Eigen::VectorXd raw_conserved(const MomentBasis& basis, const MomentVector& lambda);
Eigen::VectorXd raw_conserved(const MomentBasis& basis, const MomentVector& lambda_h1,
                              const MomentVector& lambda_h2);

/// Conserved raw moments implied by a macro state (the continuous ones).
Eigen::VectorXd conserved_from_macro(const MacroState& macro, int dim);

/// Point values of the (reduced) Maxwell-Boltzmann pdf at the grid nodes.
WeightVector maxwellian_values(const VelocityGrid& grid, const MacroState& macro,
                               MaxwellianVariant variant = MaxwellianVariant::kFull);

}  // namespace posmom
