#include "posmom/closure_entropy.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>

#include "posmom/errors.hpp"

namespace posmom {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNewtonTolerance = 1e-13;
constexpr double kArmijo = 1e-4;

// Dual of the entropy problem in normalized velocities s = (xi - v) / sqrt(theta)
// and unit density, where the targets are the moments of the unit Maxwellian.
class EntropyDual {
 public:
  EntropyDual(const VelocityGrid& grid, const MacroState& macro) : dim_(grid.dim()) {
    const double sqrt_theta = std::sqrt(macro.theta);
    for (int d = 0; d < dim_; ++d) s_[d] = (grid.component(d).array() - macro.v[d]) / sqrt_theta;
    weights_ = grid.weights() / std::pow(sqrt_theta, dim_);
    r2_ = s_[0].array().square();
    if (dim_ == 2) r2_ += s_[1].array().square();
    target_ = VectorXd::Zero(dim_ + 2);
    target_[0] = 1.0;
    target_[dim_ + 1] = dim_ == 1 ? 1.0 : 3.0;
  }

  int size() const { return dim_ + 2; }
  const VectorXd& target() const { return target_; }

  VectorXd initial() const {
    VectorXd a = VectorXd::Zero(size());
    a[0] = -0.5 * (dim_ == 1 ? 1.0 : 3.0) * std::log(2.0 * std::numbers::pi);
    a[size() - 1] = -0.5;
    return a;
  }

  bool admissible(const VectorXd& a) const { return dim_ == 1 || a[3] < 0.0; }

  // h1 (or the 1D pdf) at every node.
  Eigen::ArrayXd density(const VectorXd& a) const {
    Eigen::ArrayXd e = a[0] + a[1] * s_[0].array() + a[size() - 1] * r2_;
    if (dim_ == 2) e += a[2] * s_[1].array();
    Eigen::ArrayXd h = e.exp();
    if (dim_ == 2) h *= std::sqrt(std::numbers::pi / -a[3]);
    return h;
  }

  double objective(const VectorXd& a) const { return weights_.dot(density(a).matrix()) - target_.dot(a); }

  void derivatives(const VectorXd& a, VectorXd& grad, MatrixXd& hess) const {
    const Eigen::ArrayXd wh = weights_.array() * density(a);
    const int k = size();
    MatrixXd p(k, wh.size());
    p.row(0).setOnes();
    p.row(1) = s_[0].transpose();
    if (dim_ == 1) {
      p.row(2) = r2_.matrix().transpose();
      grad = p * wh.matrix() - target_;
      hess = p * wh.matrix().asDiagonal() * p.transpose();
      return;
    }
    // xi_3 ~ N(0, sigma^2) under f: E[xi_3^2] = sigma^2, E[xi_3^4] = 3 sigma^4.
    const double sigma2 = 1.0 / (-2.0 * a[3]);
    p.row(2) = s_[1].transpose();
    p.row(3) = (r2_ + sigma2).matrix().transpose();
    grad = p * wh.matrix() - target_;
    hess.resize(4, 4);
    hess.topLeftCorner(3, 3) = p.topRows(3) * wh.matrix().asDiagonal() * p.topRows(3).transpose();
    for (int i = 0; i < 3; ++i) {
      hess(i, 3) = hess(3, i) = p.row(i).dot(p.row(3).cwiseProduct(wh.matrix().transpose()));
    }
    const Eigen::ArrayXd r2s = r2_ + sigma2;
    hess(3, 3) = (wh * (r2s.square() + 2.0 * sigma2 * sigma2)).sum();
  }

 private:
  int dim_;
  std::array<Eigen::ArrayXd, 2> s_;
  VectorXd weights_;
  Eigen::ArrayXd r2_;
  VectorXd target_;
};

MacroState macro_from_conserved(const Eigen::VectorXd& c, int dim) {
  MacroState m;
  m.rho = c[0];
  if (!(m.rho > 0.0)) throw NonPhysicalState("discrete_maxwellian: non-positive density");
  if (dim == 1) {
    m.v[0] = c[1] / c[0];
    m.theta = c[2] / c[0] - m.v[0] * m.v[0];
  } else {
    m.v = {c[1] / c[0], c[2] / c[0]};
    m.theta = (c[3] / c[0] - m.v[0] * m.v[0] - m.v[1] * m.v[1]) / 3.0;
  }
  if (!(m.theta > 0.0)) throw NonPhysicalState("discrete_maxwellian: non-positive temperature");
  return m;
}

std::string describe(const VectorXd& a, double residual, int iteration) {
  std::ostringstream os;
  os << "iteration " << iteration << ", residual " << residual << ", alpha (" << a.transpose() << ")";
  return os.str();
}

}  // namespace

EntropySolution discrete_maxwellian(const VelocityGrid& grid, const Eigen::VectorXd& conserved,
                                    const EntropyOptions& options) {
  const int dim = grid.dim();
  if (conserved.size() != dim + 2) throw InvalidArgument("discrete_maxwellian: wrong number of conserved moments");
  if (!conserved.allFinite()) throw NonPhysicalState("discrete_maxwellian: non-finite moments");
  const MacroState macro = macro_from_conserved(conserved, dim);
  for (int d = 0; d < dim; ++d) {
    const Eigen::VectorXd& xi = grid.component(d);
    if (!(macro.v[d] > xi.minCoeff() && macro.v[d] < xi.maxCoeff())) {
      throw EntropyFailure("discrete_maxwellian: bulk velocity " + std::to_string(macro.v[d]) +
                           " outside the velocity nodes");
    }
  }

  const EntropyDual dual(grid, macro);
  VectorXd a = dual.initial();
  VectorXd grad;
  MatrixXd hess;
  double phi = dual.objective(a);
  int iteration = 0;
  for (;; ++iteration) {
    dual.derivatives(a, grad, hess);
    const double g = grad.cwiseAbs().maxCoeff();
    if (!std::isfinite(g)) throw EntropyFailure("discrete_maxwellian: non-finite gradient, " + describe(a, g, iteration));
    if (g <= kNewtonTolerance) break;
    if (iteration >= options.max_iterations) {
      if (g <= options.tol) break;
      throw EntropyFailure("discrete_maxwellian: iteration cap reached, " + describe(a, g, iteration));
    }
    const Eigen::LLT<MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) {
      throw EntropyFailure("discrete_maxwellian: singular Hessian, " + describe(a, g, iteration));
    }
    const VectorXd step = -llt.solve(grad);
    const double slope = grad.dot(step);

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      const VectorXd trial = a + t * step;
      if (!dual.admissible(trial)) continue;
      const double phi_trial = dual.objective(trial);
      bool sufficient = phi_trial <= phi + kArmijo * t * slope;
      if (!sufficient) {
        // Near the optimum the objective decrease drowns in rounding; fall
        // back to a decrease of the gradient.
        VectorXd trial_grad;
        MatrixXd trial_hess;
        dual.derivatives(trial, trial_grad, trial_hess);
        sufficient = trial_grad.cwiseAbs().maxCoeff() <= (1.0 - kArmijo * t) * g;
      }
      if (sufficient) {
        a = trial;
        phi = phi_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Rounding floor reached near the optimum.
      if (g <= options.tol) break;
      throw EntropyFailure("discrete_maxwellian: line search failed, " + describe(a, g, iteration));
    }
  }

  EntropySolution sol;
  sol.iterations = iteration;
  const double sqrt_theta = std::sqrt(macro.theta);
  const Eigen::ArrayXd h = dual.density(a);
  if (dim == 1) {
    sol.W = (macro.rho / sqrt_theta) * h.matrix();
  } else {
    sol.W = (macro.rho / macro.theta) * h.matrix();
    sol.W2 = (macro.rho / (-2.0 * a[3])) * h.matrix();
  }

  // Exponent in raw velocities: s = (xi - v) / sqrt(theta).
  const double c = a[dim + 1] / macro.theta;
  sol.alpha = VectorXd::Zero(dim + 2);
  double v2 = 0.0;
  double b_dot_v = 0.0;
  for (int d = 0; d < dim; ++d) {
    sol.alpha[1 + d] = a[1 + d] / sqrt_theta - 2.0 * c * macro.v[d];
    v2 += macro.v[d] * macro.v[d];
    b_dot_v += a[1 + d] * macro.v[d] / sqrt_theta;
  }
  sol.alpha[dim + 1] = c;
  sol.alpha[0] = std::log(macro.rho / std::pow(sqrt_theta, dim == 1 ? 1 : 3)) + a[0] - b_dot_v + c * v2;

  // Residual of the raw conserved moments.
  const Eigen::VectorXd& L = grid.weights();
  VectorXd got(dim + 2);
  got[0] = L.dot(sol.W);
  Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(sol.W.size());
  for (int d = 0; d < dim; ++d) {
    got[1 + d] = L.dot(grid.component(d).cwiseProduct(sol.W));
    r2 += grid.component(d).array().square();
  }
  got[dim + 1] = L.dot((r2 * sol.W.array()).matrix());
  if (dim == 2) got[3] += L.dot(sol.W2);
  sol.constraint_residual = (got - conserved).cwiseAbs().maxCoeff() / conserved.cwiseAbs().maxCoeff();
  if (!(sol.constraint_residual <= options.tol)) {
    throw EntropyFailure("discrete_maxwellian: conserved moments not matched, " +
                         describe(a, sol.constraint_residual, iteration));
  }
  return sol;
}

}  // namespace posmom
