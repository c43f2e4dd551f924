#include "posmom/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "posmom/errors.hpp"

namespace posmom {

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

std::vector<std::array<int, 2>> make_exponents(int dim, int order) {
  std::vector<std::array<int, 2>> e;
  if (dim == 1) {
    for (int k = 0; k < order; ++k) e.push_back({k, 0});
    return e;
  }
  for (int degree = 0; degree < order; ++degree) {
    for (int b = 0; b <= degree; ++b) e.push_back({degree - b, b});
  }
  return e;
}

}  // namespace

MomentBasis::MomentBasis(std::shared_ptr<const VelocityGrid> grid, int order, BasisOptions options)
    : grid_(std::move(grid)), order_(order) {
  if (!grid_) throw InvalidArgument("MomentBasis: null velocity grid");
  if (order < 1) throw InvalidArgument("MomentBasis: order must be positive");
  if (order < 3 && !options.allow_low_order) {
    throw ConfigurationError("MomentBasis: order " + std::to_string(order) +
                             " does not contain the conserved moments (need >= 3)");
  }
  const int dim = grid_->dim();
  exponents_ = make_exponents(dim, order);

  const Eigen::Index m = moment_count();
  const Eigen::Index n = node_count();
  if (n < m || (n == m && !options.allow_square)) {
    throw ConfigurationError("MomentBasis: " + std::to_string(n) + " nodes for " + std::to_string(m) +
                             " moments; need more nodes than moments");
  }

  std::array<Eigen::VectorXd, 2> scaled;
  for (int d = 0; d < dim; ++d) {
    scaled[d] = (grid_->component(d).array() - center(d)) / scale(d);
  }

  a_.resize(m, n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto [ea, eb] = exponents_[k];
    Eigen::ArrayXd row = scaled[0].array().pow(ea);
    if (dim == 2 && eb > 0) row *= scaled[1].array().pow(eb);
    a_.row(k) = row.matrix().transpose();
  }
  al_ = a_ * L().asDiagonal();

  to_raw_ = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto [ea, eb] = exponents_[k];
    for (int i = 0; i <= ea; ++i) {
      const double ca = binomial(ea, i) * std::pow(center(0), ea - i) * std::pow(scale(0), i);
      if (dim == 1) {
        to_raw_(k, index_of(i)) += ca;
        continue;
      }
      for (int j = 0; j <= eb; ++j) {
        const double cb = binomial(eb, j) * std::pow(center(1), eb - j) * std::pow(scale(1), j);
        to_raw_(k, index_of(i, j)) += ca * cb;
      }
    }
  }
}

Eigen::Index MomentBasis::index_of(int a, int b) const {
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    if (exponents_[k][0] == a && exponents_[k][1] == b) return static_cast<Eigen::Index>(k);
  }
  return -1;
}

std::shared_ptr<const MomentBasis> build_basis(std::shared_ptr<const VelocityGrid> grid, int order,
                                               BasisOptions options) {
  return std::make_shared<const MomentBasis>(std::move(grid), order, options);
}

MomentVector moments(const MomentBasis& basis, const WeightVector& w) {
  if (w.size() != basis.node_count()) throw InvalidArgument("moments: weight vector has wrong length");
  return basis.AL() * w;
}

namespace {

double raw_moment(const MomentBasis& basis, const MomentVector& lambda, int a, int b = 0) {
  const Eigen::Index k = basis.index_of(a, b);
  if (k < 0) throw ConfigurationError("basis lacks the conserved moments");
  return basis.to_raw().row(k).dot(lambda);
}

void check_length(const MomentBasis& basis, const MomentVector& lambda) {
  if (lambda.size() != basis.moment_count()) throw InvalidArgument("moment vector has wrong length");
}

}  // namespace

Eigen::VectorXd raw_conserved(const MomentBasis& basis, const MomentVector& lambda) {
  check_length(basis, lambda);
  if (basis.dim() != 1) throw InvalidArgument("raw_conserved: 2D needs the (h1, h2) pair");
  return Eigen::Vector3d(raw_moment(basis, lambda, 0), raw_moment(basis, lambda, 1),
                         raw_moment(basis, lambda, 2));
}

Eigen::VectorXd raw_conserved(const MomentBasis& basis, const MomentVector& lambda_h1,
                              const MomentVector& lambda_h2) {
  check_length(basis, lambda_h1);
  check_length(basis, lambda_h2);
  if (basis.dim() != 2) throw InvalidArgument("raw_conserved: pair form is 2D only");
  const double energy =
      raw_moment(basis, lambda_h1, 2, 0) + raw_moment(basis, lambda_h1, 0, 2) + raw_moment(basis, lambda_h2, 0, 0);
  return Eigen::Vector4d(raw_moment(basis, lambda_h1, 0, 0), raw_moment(basis, lambda_h1, 1, 0),
                         raw_moment(basis, lambda_h1, 0, 1), energy);
}

MacroState macro_from_moments(const MomentBasis& basis, const MomentVector& lambda) {
  const Eigen::VectorXd c = raw_conserved(basis, lambda);
  if (!(c[0] > 0.0)) throw NonPhysicalState("non-positive density " + std::to_string(c[0]));
  MacroState m;
  m.rho = c[0];
  m.v[0] = c[1] / c[0];
  m.theta = c[2] / c[0] - m.v[0] * m.v[0];
  if (!(m.theta > 0.0)) throw NonPhysicalState("non-positive temperature " + std::to_string(m.theta));
  return m;
}

MacroState macro_from_moments(const MomentBasis& basis, const MomentVector& lambda_h1,
                              const MomentVector& lambda_h2) {
  const Eigen::VectorXd c = raw_conserved(basis, lambda_h1, lambda_h2);
  if (!(c[0] > 0.0)) throw NonPhysicalState("non-positive density " + std::to_string(c[0]));
  MacroState m;
  m.rho = c[0];
  m.v = {c[1] / c[0], c[2] / c[0]};
  const double v2 = m.v[0] * m.v[0] + m.v[1] * m.v[1];
  m.theta = (c[3] - m.rho * v2) / (3.0 * m.rho);
  if (!(m.theta > 0.0)) throw NonPhysicalState("non-positive temperature " + std::to_string(m.theta));
  return m;
}

Eigen::VectorXd conserved_from_macro(const MacroState& macro, int dim) {
  if (dim == 1) {
    return Eigen::Vector3d(macro.rho, macro.rho * macro.v[0],
                           macro.rho * (macro.theta + macro.v[0] * macro.v[0]));
  }
  const double v2 = macro.v[0] * macro.v[0] + macro.v[1] * macro.v[1];
  return Eigen::Vector4d(macro.rho, macro.rho * macro.v[0], macro.rho * macro.v[1],
                         macro.rho * (3.0 * macro.theta + v2));
}

WeightVector maxwellian_values(const VelocityGrid& grid, const MacroState& macro, MaxwellianVariant variant) {
  if (!(macro.rho > 0.0) || !(macro.theta > 0.0)) {
    throw NonPhysicalState("maxwellian_values: need rho > 0 and theta > 0");
  }
  const double two_theta = 2.0 * macro.theta;
  if (grid.dim() == 1) {
    if (variant != MaxwellianVariant::kFull) throw InvalidArgument("reduced Maxwellians are 2D only");
    const double norm = macro.rho / std::sqrt(std::numbers::pi * two_theta);
    return norm * (-(grid.component(0).array() - macro.v[0]).square() / two_theta).exp();
  }
  if (variant == MaxwellianVariant::kFull) throw InvalidArgument("2D grids take the h1/h2 variants");
  const Eigen::ArrayXd r2 =
      (grid.component(0).array() - macro.v[0]).square() + (grid.component(1).array() - macro.v[1]).square();
  double norm = macro.rho / (std::numbers::pi * two_theta);
  if (variant == MaxwellianVariant::kH2) norm *= macro.theta;
  return norm * (-r2 / two_theta).exp();
}

}  // namespace posmom
