#pragma once

#include <Eigen/Core>

#include "posmom/basis.hpp"
#include "posmom/quadrature.hpp"

namespace posmom {

struct EntropyOptions {
  double tol = 1e-8;  ///< conserved-moment residual, relative to the largest target
  int max_iterations = 100;
  int max_halvings = 50;
};

/// Discrete Maxwellian: the entropy minimizer on the grid subject to the
/// conserved moments.
///
/// 1D: W_i = exp(alpha_0 + alpha_1 xi_i + alpha_2 xi_i^2).
/// 2D: the xi_3-integrated pair of f = exp(alpha_0 + alpha_1 xi_1 + alpha_2 xi_2
///     + alpha_3 |xi|^2) in three velocity dimensions,
///       h1 = sqrt(pi / -alpha_3) exp(alpha_0 + alpha_1 xi_1 + alpha_2 xi_2 + alpha_3 (xi_1^2 + xi_2^2)),
///       h2 = h1 / (-2 alpha_3).
struct EntropySolution {
  WeightVector W;      ///< 1D pdf, or h1 in 2D
  WeightVector W2;     ///< h2 in 2D; empty in 1D
  Eigen::VectorXd alpha;  ///< exponent coefficients in raw velocities
  int iterations = 0;
  double constraint_residual = 0.0;  ///< relative, as EntropyOptions::tol
};

/// `conserved` holds raw conserved moments as returned by raw_conserved():
/// (rho, rho v, rho (theta + v^2)) in 1D, (rho, rho v1, rho v2, energy) in 2D.
EntropySolution discrete_maxwellian(const VelocityGrid& grid, const Eigen::VectorXd& conserved,
                                    const EntropyOptions& options = {});

}  // namespace posmom
