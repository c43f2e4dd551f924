#include "posmom/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "posmom/errors.hpp"

namespace posmom {

namespace {

constexpr double kResidualTolerance = 1e-15;
constexpr int kMaxNewtonIterations = 100;

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

QuadratureRule1D gauss_legendre(int n, double lo, double hi) {
  if (n < 1) {
    throw InvalidArgument("gauss_legendre: n must be positive, got " + std::to_string(n));
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidArgument("gauss_legendre: need finite lo < hi");
  }

  std::vector<double> x(n);
  std::vector<double> w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess for the i-th largest root.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
      const auto [p, d] = legendre_with_derivative(n, z);
      const double dz = p / d;
      z -= dz;
      // Residual at machine precision, or the update has stagnated in the
      // last bit (large n, where |P_n| cannot drop below n * eps).
      if (std::abs(p) <= kResidualTolerance || std::abs(dz) <= 1e-16 * std::abs(z)) break;
    }
    const double dp = legendre_with_derivative(n, z).second;
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = weight;
    w[n - 1 - i] = weight;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  QuadratureRule1D rule;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (lo + hi);
  const double half_width = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half_width * x[i];
    rule.weights[i] = half_width * w[i];
  }
  return rule;
}

double VelocityBox::max_speed() const { return std::max(std::abs(lo), std::abs(hi)); }

VelocityGrid::VelocityGrid(const QuadratureRule1D& rule, int dim) : dim_(dim), rule_(rule) {
  if (dim != 1 && dim != 2) {
    throw InvalidArgument("VelocityGrid: dim must be 1 or 2, got " + std::to_string(dim));
  }
  if (rule.size() == 0) throw InvalidArgument("VelocityGrid: empty quadrature rule");

  const auto n = static_cast<Eigen::Index>(rule.size());
  const Eigen::Map<const Eigen::VectorXd> nodes(rule.nodes.data(), n);
  const Eigen::Map<const Eigen::VectorXd> weights(rule.weights.data(), n);
  boxes_[0] = {rule.lo, rule.hi};
  boxes_[1] = {rule.lo, rule.hi};

  if (dim == 1) {
    weights_ = weights;
    components_[0] = nodes;
    return;
  }

  weights_.resize(n * n);
  components_[0].resize(n * n);
  components_[1].resize(n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index k = i * n + j;
      weights_[k] = weights[i] * weights[j];
      components_[0][k] = nodes[i];
      components_[1][k] = nodes[j];
    }
  }
}

double VelocityGrid::volume() const {
  double v = 1.0;
  for (int d = 0; d < dim_; ++d) v *= boxes_[d].hi - boxes_[d].lo;
  return v;
}

VelocityGrid tensor_grid(const QuadratureRule1D& rule, int dim) { return VelocityGrid(rule, dim); }

}  // namespace posmom
