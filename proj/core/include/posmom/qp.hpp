#pragma once

#include <Eigen/Core>

namespace posmom {

/// Primal-dual interior point for the separable convex QP
///
///   minimize   sum_i ( h_i x_i^2 / 2 + g_i x_i )
///   subject to C^T x = c,  x >= 0
///
/// with C an n x m matrix (n >= m) and h_i >= 0. h = 0 gives an LP.
/// Mehrotra predictor-corrector on the normal equations C^T D C.
struct InteriorPointOptions {
  double primal_tol = 1e-12;  ///< ||C^T x - c||_inf / (1 + ||c||_inf)
  double dual_tol = 1e-10;    ///< ||h x + g - C y - z||_inf / (1 + scale)
  double gap_tol = 1e-11;     ///< x^T z / (1 + |objective|)
  int max_iterations = 200;
  double step_fraction = 0.995;
};

enum class InteriorPointOutcome { kConverged, kMaxIterations, kStalled, kDiverged };

struct InteriorPointResult {
  Eigen::VectorXd x;  ///< primal
  Eigen::VectorXd y;  ///< equality multipliers
  Eigen::VectorXd z;  ///< bound multipliers, z >= 0
  int iterations = 0;
  InteriorPointOutcome outcome = InteriorPointOutcome::kMaxIterations;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;

  bool converged() const { return outcome == InteriorPointOutcome::kConverged; }
};

/// Optional starting point. An empty x selects the Mehrotra heuristic.
struct InteriorPointStart {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

InteriorPointResult solve_diagonal_qp(const Eigen::MatrixXd& C, const Eigen::VectorXd& h,
                                      const Eigen::VectorXd& g, const Eigen::VectorXd& c,
                                      const InteriorPointOptions& options = {},
                                      const InteriorPointStart& start = {});

}  // namespace posmom
