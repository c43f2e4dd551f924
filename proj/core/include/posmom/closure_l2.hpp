#pragma once

#include <memory>
#include <optional>

#include <Eigen/Core>

#include "posmom/basis.hpp"
#include "posmom/qp.hpp"

namespace posmom {

enum class ClosureStatus { kSolved, kInfeasible, kMaxIterations };

const char* to_string(ClosureStatus status);

enum class ClosureMethod {
  /// Cold-started interior point only.
  kInteriorPoint,
  /// Dual semismooth Newton from a warm start (or the least-norm dual when
  /// none is given), falling back to the interior point on failure.
  kAuto,
};

struct ClosureOptions {
  double eq_tol = 1e-9;    ///< ||A L W - lambda||_inf relative to ||lambda||_inf
  double gap_tol = 1e-9;   ///< duality gap, relative
  double kkt_tol = 1e-8;   ///< stationarity, relative to ||W||_inf
  double comp_tol = 1e-8;  ///< max_i nu_i W_i relative to ||W||_inf^2
  int max_iterations = 200;
  ClosureMethod method = ClosureMethod::kInteriorPoint;
};

/// Solution of   min 1/2 ||W||^2  s.t.  A L W = lambda,  W >= 0.
struct ClosureSolution {
  WeightVector W;
  int iterations = 0;
  double constraint_residual = 0.0;  ///< ||A L W - lambda||_inf
  double relative_residual = 0.0;    ///< the above over ||lambda||_inf
  double min_weight = 0.0;
  double kkt_residual = 0.0;
  double complementarity = 0.0;
  ClosureStatus status = ClosureStatus::kMaxIterations;
  /// Equality multipliers in the orthonormalized constraint frame; pass back
  /// through WarmStart to seed the next nearby solve.
  Eigen::VectorXd dual;
  bool used_fallback = false;
};

struct WarmStart {
  Eigen::VectorXd dual;  ///< from a previous ClosureSolution
  WeightVector W;        ///< optional primal for the interior point
};

struct RealizabilityReport {
  bool realizable = false;
  std::optional<WeightVector> witness;  ///< z >= 0 with A L z = lambda
  double witness_min = 0.0;
  double infeasibility = 0.0;  ///< optimal l1 constraint violation, normalized
};

/// Factorizes (A L)^T = Q R once per basis; all solves are const and
/// share no mutable state, so one instance serves concurrent callers.
class PositiveL2Closure {
 public:
  explicit PositiveL2Closure(std::shared_ptr<const MomentBasis> basis, ClosureOptions options = {});

  const MomentBasis& basis() const { return *basis_; }
  const ClosureOptions& options() const { return options_; }

  ClosureSolution solve(const MomentVector& lambda) const;
  ClosureSolution solve(const MomentVector& lambda, const WarmStart& warm) const;

  /// Phase-1 LP: is lambda = A L z for some z >= 0?
  RealizabilityReport check_realizability(const MomentVector& lambda) const;

  /// Unconstrained L2 projection (Galerkin); node values of alpha^T P_M with
  /// G alpha = lambda. Not necessarily positive.
  WeightVector solve_dg(const MomentVector& lambda) const;

 private:
  ClosureSolution finish(const MomentVector& lambda, WeightVector w, const Eigen::VectorXd& dual,
                         const Eigen::VectorXd& bound_multipliers, double scale, int iterations) const;
  ClosureSolution solve_square(const MomentVector& lambda) const;
  bool dual_newton(const Eigen::VectorXd& c, Eigen::VectorXd& y, int& iterations) const;
  ClosureSolution classify_failure(const MomentVector& lambda, ClosureSolution best) const;

  std::shared_ptr<const MomentBasis> basis_;
  ClosureOptions options_;
  Eigen::MatrixXd q_;  // N x M, orthonormal columns
  Eigen::MatrixXd r_;  // M x M upper triangular
  Eigen::MatrixXd dg_q_;  // QR of sqrt(L) A^T for the Galerkin projection
  Eigen::MatrixXd dg_r_;
  bool dg_ok_ = false;
};

ClosureSolution solve_positive_l2(std::shared_ptr<const MomentBasis> basis, const MomentVector& lambda,
                                  const ClosureOptions& options = {});
RealizabilityReport check_realizability(std::shared_ptr<const MomentBasis> basis, const MomentVector& lambda);
WeightVector solve_dg(std::shared_ptr<const MomentBasis> basis, const MomentVector& lambda);

}  // namespace posmom
