#include "posmom/closure_l2.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "posmom/errors.hpp"

namespace posmom {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kRankTolerance = 1e-14;
constexpr double kDualNewtonTolerance = 1e-13;
constexpr int kDualNewtonIterations = 50;
constexpr double kRealizabilityTolerance = 1e-9;

// Thin QR of a tall matrix; returns false when R is numerically singular.
bool thin_qr(const MatrixXd& tall, MatrixXd& q, MatrixXd& r) {
  const Eigen::HouseholderQR<MatrixXd> qr(tall);
  const Eigen::Index m = tall.cols();
  q = qr.householderQ() * MatrixXd::Identity(tall.rows(), m);
  r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const VectorXd diag = r.diagonal().cwiseAbs();
  return diag.minCoeff() > kRankTolerance * diag.maxCoeff();
}

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

const char* to_string(ClosureStatus status) {
  switch (status) {
    case ClosureStatus::kSolved:
      return "solved";
    case ClosureStatus::kInfeasible:
      return "infeasible";
    case ClosureStatus::kMaxIterations:
      return "max-iterations";
  }
  return "unknown";
}

PositiveL2Closure::PositiveL2Closure(std::shared_ptr<const MomentBasis> basis, ClosureOptions options)
    : basis_(std::move(basis)), options_(options) {
  if (!basis_) throw InvalidArgument("PositiveL2Closure: null basis");
  if (!thin_qr(basis_->AL().transpose(), q_, r_)) {
    throw ConditioningError("PositiveL2Closure: A L is numerically rank deficient");
  }
  const MatrixXd sqrt_l_at = basis_->L().cwiseSqrt().asDiagonal() * basis_->A().transpose();
  dg_ok_ = thin_qr(sqrt_l_at, dg_q_, dg_r_);
}

ClosureSolution PositiveL2Closure::solve(const MomentVector& lambda) const { return solve(lambda, WarmStart{}); }

ClosureSolution PositiveL2Closure::solve(const MomentVector& lambda, const WarmStart& warm) const {
  const Eigen::Index m = basis_->moment_count();
  const Eigen::Index n = basis_->node_count();
  if (lambda.size() != m) throw InvalidArgument("solve_positive_l2: moment vector has wrong length");

  // The zeroth moment is the mass of a non-negative function.
  if (!lambda.allFinite() || !(lambda[0] > 0.0)) {
    ClosureSolution s;
    s.W = WeightVector::Zero(n);
    s.status = ClosureStatus::kInfeasible;
    s.constraint_residual = inf_norm(lambda);
    s.relative_residual = 1.0;
    return s;
  }
  if (n == m) return solve_square(lambda);

  // Orthonormal constraint frame: A L W = lambda  <=>  Q^T W = c.
  const VectorXd c_raw = r_.transpose().triangularView<Eigen::Lower>().solve(lambda);
  const double scale = c_raw.norm();
  const VectorXd c = c_raw / scale;

  ClosureSolution best;
  auto newton_from = [&](VectorXd y) {
    int iterations = 0;
    if (!dual_newton(c, y, iterations)) return false;
    const VectorXd u = q_ * y;
    ClosureSolution s = finish(lambda, scale * u.cwiseMax(0.0), scale * y, scale * (-u).cwiseMax(0.0), scale,
                               iterations);
    const bool solved = s.status == ClosureStatus::kSolved;
    if (solved || best.W.size() == 0 || s.relative_residual < best.relative_residual) best = std::move(s);
    return solved;
  };
  if (options_.method == ClosureMethod::kAuto) {
    if (warm.dual.size() == m && newton_from(warm.dual / scale)) return best;
    if (newton_from(c)) return best;
  }

  InteriorPointOptions ipm;
  ipm.max_iterations = options_.max_iterations;
  InteriorPointStart start;
  if (warm.W.size() == n) {
    start.x = warm.W / scale;
    if (warm.dual.size() == m) start.y = warm.dual / scale;
  }
  const InteriorPointResult r =
      solve_diagonal_qp(q_, VectorXd::Ones(n), VectorXd::Zero(n), c, ipm, start);
  ClosureSolution s = finish(lambda, scale * r.x, scale * r.y, scale * r.z, scale, r.iterations);
  s.used_fallback = options_.method == ClosureMethod::kAuto;
  if (s.status == ClosureStatus::kSolved) return s;
  if (best.W.size() == 0 || s.relative_residual < best.relative_residual) best = std::move(s);
  // Interior points can stall short of the complementarity tolerance on
  // degenerate optima; the dual Newton finishes from the stalled multipliers.
  if (r.y.allFinite() && newton_from(r.y)) {
    best.used_fallback = true;
    return best;
  }
  return classify_failure(lambda, std::move(best));
}

ClosureSolution PositiveL2Closure::finish(const MomentVector& lambda, WeightVector w, const VectorXd& dual,
                                          const VectorXd& bound_multipliers, double /*scale*/,
                                          int iterations) const {
  ClosureSolution s;
  s.iterations = iterations;
  s.dual = dual;
  const double lambda_norm = inf_norm(lambda);
  s.constraint_residual = inf_norm(basis_->AL() * w - lambda);
  s.relative_residual = s.constraint_residual / lambda_norm;
  s.min_weight = w.minCoeff();

  const double w_norm = std::max(inf_norm(w), 1e-300);
  s.kkt_residual = inf_norm(w - q_ * dual - bound_multipliers) / w_norm;
  double comp = 0.0;
  double gap = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    comp = std::max(comp, std::abs(bound_multipliers[i]) * std::abs(w[i]));
    gap += bound_multipliers[i] * w[i];
  }
  s.complementarity = comp / (w_norm * w_norm);
  const double negative_multiplier = std::max(-bound_multipliers.minCoeff(), 0.0) / w_norm;
  const double rel_gap = std::abs(gap) / std::max(w.squaredNorm(), 1e-300);

  const bool ok = s.relative_residual <= options_.eq_tol && s.kkt_residual <= options_.kkt_tol &&
                  s.complementarity <= options_.comp_tol && rel_gap <= options_.gap_tol &&
                  negative_multiplier <= options_.kkt_tol && s.min_weight >= 0.0;
  s.status = ok ? ClosureStatus::kSolved : ClosureStatus::kMaxIterations;
  s.W = std::move(w);
  return s;
}

ClosureSolution PositiveL2Closure::solve_square(const MomentVector& lambda) const {
  ClosureSolution s;
  const VectorXd c = r_.transpose().triangularView<Eigen::Lower>().solve(lambda);
  s.W = q_ * c;
  s.dual = c;
  s.constraint_residual = inf_norm(basis_->AL() * s.W - lambda);
  s.relative_residual = s.constraint_residual / inf_norm(lambda);
  s.min_weight = s.W.minCoeff();
  s.status = s.min_weight >= 0.0 && s.relative_residual <= options_.eq_tol ? ClosureStatus::kSolved
                                                                           : ClosureStatus::kInfeasible;
  return s;
}

// Semismooth Newton on the concave dual
//   psi(y) = c^T y - 1/2 ||(Q y)_+||^2,   W = (Q y)_+ .
bool PositiveL2Closure::dual_newton(const VectorXd& c, VectorXd& y, int& iterations) const {
  const Eigen::Index n = q_.rows();
  VectorXd u = q_ * y;
  VectorXd w = u.cwiseMax(0.0);
  double psi = c.dot(y) - 0.5 * w.squaredNorm();
  VectorXd active(n);
  for (iterations = 0; iterations < kDualNewtonIterations; ++iterations) {
    const VectorXd grad = c - q_.transpose() * w;
    if (inf_norm(grad) <= kDualNewtonTolerance) return true;

    for (Eigen::Index i = 0; i < n; ++i) active[i] = u[i] > 0.0 ? 1.0 : 0.0;
    // Generalized Hessian; the shift covers iterates with fewer than M
    // active nodes.
    MatrixXd k = q_.transpose() * active.asDiagonal() * q_;
    k.diagonal().array() += 1e-12;
    const Eigen::LLT<MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) return false;
    const VectorXd dy = llt.solve(grad);
    const double slope = grad.dot(dy);
    if (!(slope > 0.0)) return false;

    // Near the optimum the increase of psi drowns in rounding; a full step
    // that halves the gradient is accepted instead.
    const double grad_norm = inf_norm(grad);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const VectorXd y_new = y + t * dy;
      const VectorXd u_new = q_ * y_new;
      const VectorXd w_new = u_new.cwiseMax(0.0);
      const double psi_new = c.dot(y_new) - 0.5 * w_new.squaredNorm();
      if (psi_new >= psi + 1e-4 * t * slope ||
          (halving == 0 && inf_norm(c - q_.transpose() * w_new) <= 0.5 * grad_norm)) {
        y = y_new;
        u = u_new;
        w = w_new;
        psi = psi_new;
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  return inf_norm(c - q_.transpose() * w) <= kDualNewtonTolerance;
}

ClosureSolution PositiveL2Closure::classify_failure(const MomentVector& lambda, ClosureSolution best) const {
  const RealizabilityReport report = check_realizability(lambda);
  best.status = report.realizable ? ClosureStatus::kMaxIterations : ClosureStatus::kInfeasible;
  return best;
}

RealizabilityReport PositiveL2Closure::check_realizability(const MomentVector& lambda) const {
  const Eigen::Index m = basis_->moment_count();
  const Eigen::Index n = basis_->node_count();
  if (lambda.size() != m) throw InvalidArgument("check_realizability: moment vector has wrong length");

  RealizabilityReport report;
  if (!lambda.allFinite() || !(lambda[0] > 0.0)) {
    report.infeasibility = 1.0;
    return report;
  }

  const VectorXd c_raw = r_.transpose().triangularView<Eigen::Lower>().solve(lambda);
  const double scale = c_raw.norm();
  const VectorXd c = c_raw / scale;

  // min 1^T (a+ + a-)  s.t.  Q^T z + a+ - a- = c,  z, a+, a- >= 0
  MatrixXd lp(n + 2 * m, m);
  lp.topRows(n) = q_;
  lp.middleRows(n, m) = MatrixXd::Identity(m, m);
  lp.bottomRows(m) = -MatrixXd::Identity(m, m);
  VectorXd g = VectorXd::Zero(n + 2 * m);
  g.tail(2 * m).setOnes();

  // A small proximal term on z keeps the interior point iterates off the
  // tiny tail weights; the l1 penalty stays exact.
  VectorXd h = VectorXd::Zero(n + 2 * m);
  h.head(n).setConstant(1e-6);

  InteriorPointOptions ipm;
  ipm.max_iterations = options_.max_iterations;
  const InteriorPointResult r = solve_diagonal_qp(lp, h, g, c, ipm);

  report.infeasibility = r.x.tail(2 * m).sum();
  const WeightVector z = scale * r.x.head(n);
  const double residual = inf_norm(basis_->AL() * z - lambda) / inf_norm(lambda);
  report.realizable = report.infeasibility <= kRealizabilityTolerance && residual <= 1e-8;
  if (report.realizable) {
    report.witness_min = z.minCoeff();
    report.witness = z;
  }
  return report;
}

WeightVector PositiveL2Closure::solve_dg(const MomentVector& lambda) const {
  if (lambda.size() != basis_->moment_count()) throw InvalidArgument("solve_dg: moment vector has wrong length");
  if (!dg_ok_) throw ConditioningError("solve_dg: Gram matrix is numerically singular");
  // G = (sqrt(L) A^T)^T (sqrt(L) A^T) = R^T R ; values = A^T alpha.
  const VectorXd c = dg_r_.transpose().triangularView<Eigen::Lower>().solve(lambda);
  return (dg_q_ * c).cwiseQuotient(basis_->L().cwiseSqrt());
}

ClosureSolution solve_positive_l2(std::shared_ptr<const MomentBasis> basis, const MomentVector& lambda,
                                  const ClosureOptions& options) {
  return PositiveL2Closure(std::move(basis), options).solve(lambda);
}

RealizabilityReport check_realizability(std::shared_ptr<const MomentBasis> basis, const MomentVector& lambda) {
  return PositiveL2Closure(std::move(basis)).check_realizability(lambda);
}

WeightVector solve_dg(std::shared_ptr<const MomentBasis> basis, const MomentVector& lambda) {
  return PositiveL2Closure(std::move(basis)).solve_dg(lambda);
}

}  // namespace posmom
