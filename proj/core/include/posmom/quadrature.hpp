#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace posmom {

/// Gauss-Legendre rule on a closed interval [lo, hi].
struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = -1.0;
  double hi = 1.0;

  std::size_t size() const { return nodes.size(); }
};

/// N-point Gauss-Legendre rule on [lo, hi]. Exact for polynomials of degree
/// <= 2n-1. Nodes come from Newton iteration on P_n started at Chebyshev
/// points, then mapped affinely from [-1, 1].
QuadratureRule1D gauss_legendre(int n, double lo, double hi);

/// Closed velocity interval of one coordinate axis.
struct VelocityBox {
  double lo = -1.0;
  double hi = 1.0;

  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
  /// max(|lo|, |hi|): the speed entering the CFL bound.
  double max_speed() const;
};

/// Tensor-product quadrature over a truncated velocity box. Immutable.
///
/// In 2D the points are ordered row-major in the first component:
/// point k = i * n + j carries (xi_i, xi_j) and weight w_i * w_j.
class VelocityGrid {
 public:
  VelocityGrid(const QuadratureRule1D& rule, int dim);

  int dim() const { return dim_; }
  Eigen::Index size() const { return weights_.size(); }
  /// Number of 1D nodes per axis.
  int nodes_per_axis() const { return static_cast<int>(rule_.size()); }

  const QuadratureRule1D& rule() const { return rule_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// Velocity component `axis` of every point.
  const Eigen::VectorXd& component(int axis) const { return components_[axis]; }
  const VelocityBox& box(int axis) const { return boxes_[axis]; }
  /// Volume of the velocity box, (hi - lo)^dim.
  double volume() const;

 private:
  int dim_;
  QuadratureRule1D rule_;
  Eigen::VectorXd weights_;
  std::array<Eigen::VectorXd, 2> components_;
  std::array<VelocityBox, 2> boxes_;
};

VelocityGrid tensor_grid(const QuadratureRule1D& rule, int dim);

}  // namespace posmom
