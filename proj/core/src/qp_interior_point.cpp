#include "posmom/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "posmom/errors.hpp"

namespace posmom {

namespace {

using Eigen::VectorXd;

// Largest alpha in (0, 1] keeping v + alpha * dv >= 0.
double max_step(const VectorXd& v, const VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  return alpha;
}

// Normal-equation solver for one Newton system, factored once per iteration.
class NewtonSystem {
 public:
  NewtonSystem(const Eigen::MatrixXd& C, const VectorXd& h, const VectorXd& x, const VectorXd& z)
      : C_(C), x_(x), z_(z) {
    d_ = (h.array() + z.array() / x.array()).inverse().matrix();
    Eigen::MatrixXd k = C.transpose() * d_.asDiagonal() * C;
    llt_.compute(k);
    if (llt_.info() != Eigen::Success) {
      // Rank deficiency from many saturated bounds: tiny Tikhonov shift.
      const double shift = 1e-14 * std::max(k.diagonal().maxCoeff(), 1e-300);
      k.diagonal().array() += shift;
      llt_.compute(k);
    }
    ok_ = llt_.info() == Eigen::Success;
  }

  bool ok() const { return ok_; }

  void solve(const VectorXd& rd, const VectorXd& rp, const VectorXd& rc, VectorXd& dx, VectorXd& dy,
             VectorXd& dz) const {
    const VectorXd rhs_x = -rd - (rc.array() / x_.array()).matrix();
    dy = llt_.solve(-rp - C_.transpose() * d_.cwiseProduct(rhs_x));
    dx = d_.cwiseProduct(rhs_x + C_ * dy);
    dz = ((-rc - z_.cwiseProduct(dx)).array() / x_.array()).matrix();
  }

 private:
  const Eigen::MatrixXd& C_;
  const VectorXd& x_;
  const VectorXd& z_;
  VectorXd d_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool ok_ = false;
};

void default_start(const Eigen::MatrixXd& C, const VectorXd& h, const VectorXd& g, const VectorXd& c,
                   VectorXd& x, VectorXd& y, VectorXd& z) {
  const Eigen::Index n = C.rows();
  // Least-norm point of the equality constraints.
  const Eigen::LDLT<Eigen::MatrixXd> ctc(C.transpose() * C);
  x = C * ctc.solve(c);
  y = VectorXd::Zero(C.cols());
  z = h.cwiseProduct(x) + g;

  const double dx = std::max(-1.5 * x.minCoeff(), 0.0);
  const double dz = std::max(-1.5 * z.minCoeff(), 0.0);
  x.array() += dx;
  z.array() += dz;
  const double xz = x.dot(z);
  if (xz > 0.0) {
    x.array() += 0.5 * xz / z.sum();
    z.array() += 0.5 * xz / x.sum();
  }
  // Degenerate data (c = 0 or g = h x = 0) leaves zeros behind.
  const double floor_x = std::max(1e-2 * x.cwiseAbs().maxCoeff(), 1e-8);
  const double floor_z = std::max(1e-2 * z.cwiseAbs().maxCoeff(), 1e-8);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = std::max(x[i], floor_x);
    z[i] = std::max(z[i], floor_z);
  }
}

}  // namespace

InteriorPointResult solve_diagonal_qp(const Eigen::MatrixXd& C, const VectorXd& h, const VectorXd& g,
                                      const VectorXd& c, const InteriorPointOptions& options,
                                      const InteriorPointStart& start) {
  const Eigen::Index n = C.rows();
  const Eigen::Index m = C.cols();
  if (h.size() != n || g.size() != n || c.size() != m) {
    throw InvalidArgument("solve_diagonal_qp: inconsistent dimensions");
  }
  const bool quadratic = (h.array() > 0.0).any();

  VectorXd x, y, z;
  if (start.x.size() == n) {
    const double mean = std::max(start.x.cwiseAbs().mean(), 1e-300);
    x = start.x.cwiseMax(1e-10 * mean);
    y = start.y.size() == m ? start.y : VectorXd::Zero(m);
    z = h.cwiseProduct(x) + g - C * y;
    z = z.cwiseMax(1e-10 * mean);
  } else {
    default_start(C, h, g, c, x, y, z);
  }

  const double c_norm = c.cwiseAbs().maxCoeff();
  const double g_norm = g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
  const double initial_scale = std::max({x.cwiseAbs().maxCoeff(), z.cwiseAbs().maxCoeff(), 1.0});

  InteriorPointResult result;
  VectorXd dx_aff, dy_aff, dz_aff, dx, dy, dz;
  int tiny_steps = 0;
  int stagnant = 0;
  double best_merit = std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    const VectorXd rp = C.transpose() * x - c;
    const VectorXd rd = h.cwiseProduct(x) + g - C * y - z;
    const double mu = x.dot(z) / static_cast<double>(n);
    const double objective = 0.5 * h.dot(x.cwiseProduct(x)) + g.dot(x);

    result.primal_residual = rp.cwiseAbs().maxCoeff() / (1.0 + c_norm);
    result.dual_residual =
        rd.cwiseAbs().maxCoeff() / (1.0 + g_norm + (quadratic ? x.cwiseAbs().maxCoeff() : 0.0));
    result.gap = x.dot(z) / (1.0 + std::abs(objective));
    result.iterations = iter;

    if (result.primal_residual <= options.primal_tol && result.dual_residual <= options.dual_tol &&
        result.gap <= options.gap_tol) {
      result.outcome = InteriorPointOutcome::kConverged;
      break;
    }
    if (iter >= options.max_iterations) {
      result.outcome = InteriorPointOutcome::kMaxIterations;
      break;
    }
    // Rounding floor: the residuals stop improving while mu keeps shrinking.
    const double merit = std::max({result.primal_residual / options.primal_tol, result.dual_residual / options.dual_tol,
                                   result.gap / options.gap_tol});
    if (merit < 0.99 * best_merit) {
      best_merit = merit;
      stagnant = 0;
    } else if (++stagnant >= 30 || !(mu > 1e-200)) {
      result.outcome = InteriorPointOutcome::kStalled;
      break;
    }
    const double size = std::max(x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff());
    if (!std::isfinite(size) || size > 1e12 * initial_scale) {
      result.outcome = InteriorPointOutcome::kDiverged;
      break;
    }

    const NewtonSystem system(C, h, x, z);
    if (!system.ok()) {
      result.outcome = InteriorPointOutcome::kStalled;
      break;
    }

    // Predictor.
    const VectorXd rc_aff = x.cwiseProduct(z);
    system.solve(rd, rp, rc_aff, dx_aff, dy_aff, dz_aff);
    double ap = max_step(x, dx_aff);
    double ad = max_step(z, dz_aff);
    if (quadratic) ap = ad = std::min(ap, ad);
    const double mu_aff = (x + ap * dx_aff).dot(z + ad * dz_aff) / static_cast<double>(n);
    const double sigma = std::pow(mu_aff / mu, 3);

    // Corrector.
    const VectorXd rc =
        (x.cwiseProduct(z) + dx_aff.cwiseProduct(dz_aff)).array() - sigma * mu;
    system.solve(rd, rp, rc, dx, dy, dz);
    ap = std::min(1.0, options.step_fraction * max_step(x, dx));
    ad = std::min(1.0, options.step_fraction * max_step(z, dz));
    if (quadratic) ap = ad = std::min(ap, ad);

    if (!dx.allFinite() || !dy.allFinite() || !dz.allFinite()) {
      result.outcome = InteriorPointOutcome::kStalled;
      break;
    }
    x += ap * dx;
    y += ad * dy;
    z += ad * dz;

    tiny_steps = (std::max(ap, ad) < 1e-10) ? tiny_steps + 1 : 0;
    if (tiny_steps >= 5) {
      result.outcome = InteriorPointOutcome::kStalled;
      break;
    }
  }

  result.x = std::move(x);
  result.y = std::move(y);
  result.z = std::move(z);
  return result;
}

}  // namespace posmom
