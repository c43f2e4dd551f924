#include "posmom/cases.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "posmom/errors.hpp"

namespace posmom {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigurationError("case override " + key + ": not a number: '" + value + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigurationError("case override " + key + ": not an integer: '" + value + "'");
  }
  return out;
}

std::string format(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, r.ptr};
}

double l2(const Eigen::VectorXd& v, double cell_volume) { return std::sqrt(cell_volume * v.squaredNorm()); }

double cell_volume(const Mesh& mesh) { return mesh.dim == 1 ? mesh.dx() : mesh.dx() * mesh.dy(); }

// rho, v_1..v_dim, theta per cell from raw conserved moments.
Eigen::MatrixXd primitive(int dim, const Eigen::MatrixXd& conserved) {
  Eigen::MatrixXd out(dim + 2, conserved.cols());
  for (Eigen::Index c = 0; c < conserved.cols(); ++c) {
    const double rho = conserved(0, c);
    double v2 = 0.0;
    out(0, c) = rho;
    for (int d = 0; d < dim; ++d) {
      out(1 + d, c) = conserved(1 + d, c) / rho;
      v2 += out(1 + d, c) * out(1 + d, c);
    }
    out(dim + 1, c) = (conserved(dim + 1, c) / rho - v2) / (dim == 1 ? 1.0 : 3.0);
  }
  return out;
}

}  // namespace

const char* to_string(CaseId id) {
  switch (id) {
    case CaseId::kBimodal:
      return "bimodal";
    case CaseId::kSod:
      return "sod";
    case CaseId::kTwoBeam:
      return "two-beam";
    case CaseId::kBubble2d:
      return "bubble2d";
  }
  return "unknown";
}

CaseId parse_case_id(const std::string& name) {
  for (CaseId id : {CaseId::kBimodal, CaseId::kSod, CaseId::kTwoBeam, CaseId::kBubble2d}) {
    if (name == to_string(id)) return id;
  }
  throw ConfigurationError("unknown case '" + name + "' (expected bimodal, sod, two-beam or bubble2d)");
}

double BimodalParams::operator()(double xi) const {
  const double two_pi = 2.0 * std::numbers::pi;
  return std::exp(-(xi - u0) * (xi - u0) / (2.0 * theta0)) / std::sqrt(two_pi * theta0) +
         std::exp(-(xi - u1) * (xi - u1) / (2.0 * theta1)) / std::sqrt(two_pi * theta1);
}

MacroState CaseSpec::initial_state(double x, double y) const {
  switch (id) {
    case CaseId::kBimodal:
      throw ConfigurationError("bimodal case has no spatial initial data");
    case CaseId::kSod:
    case CaseId::kTwoBeam:
      return x <= 0.0 ? left : right;
    case CaseId::kBubble2d: {
      const double dx = x - bubble.center[0];
      const double dy = y - bubble.center[1];
      MacroState m;
      m.rho = bubble.rho0 + bubble.amplitude * std::exp(-(dx * dx + dy * dy) * bubble.sharpness);
      return m;
    }
  }
  return {};
}

InitialData CaseSpec::initial_data() const {
  const CaseSpec copy = *this;
  return [copy](double x, double y) { return copy.initial_state(x, y); };
}

Mesh CaseSpec::mesh() const {
  if (dim == 1) return make_mesh_1d(nx, lo[0], hi[0]);
  return make_mesh_2d(nx, ny, lo, hi);
}

CaseSpec make_case(const std::string& name, const std::map<std::string, std::string>& overrides) {
  CaseSpec s;
  s.id = parse_case_id(name);
  switch (s.id) {
    case CaseId::kBimodal:
      s.lo = {0.0, 0.0};
      s.hi = {1.0, 1.0};
      s.t_end = 0.0;
      s.moments = 22;
      s.nodes = 40;
      s.nx = 1;
      s.box = {-20.0, 20.0};
      break;
    case CaseId::kSod:
      s.left = MacroState{7.0, {0.0, 0.0}, 1.0};
      s.right = MacroState{1.0, {0.0, 0.0}, 1.0};
      s.moments = 10;
      s.box = {-7.0, 7.0};
      s.dt_factor = 0.5;
      break;
    case CaseId::kTwoBeam:
      s.left = MacroState{1.0, {1.0, 0.0}, 1.0};
      s.right = MacroState{1.0, {-1.0, 0.0}, 1.0};
      s.moments = 7;
      s.box = {-5.0, 5.0};
      s.dt_factor = 0.5;
      break;
    case CaseId::kBubble2d:
      s.dim = 2;
      s.lo = {0.0, 0.0};
      s.hi = {1.0, 1.0};
      s.t_end = 0.2;
      s.moments = 5;
      s.nodes = 40;
      s.nx = 150;
      s.ny = 150;
      s.reference_nodes = 40;
      s.box = {-7.0, 7.0};
      s.dt_factor = 0.25;
      break;
  }
  apply_overrides(s, overrides);
  return s;
}

void apply_overrides(CaseSpec& s, const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) {
    if (key == "kn") s.kn = parse_double(key, value);
    else if (key == "t_end") s.t_end = parse_double(key, value);
    else if (key == "M") s.moments = parse_int(key, value);
    else if (key == "N") s.nodes = parse_int(key, value);
    else if (key == "N_ref") s.reference_nodes = parse_int(key, value);
    else if (key == "nx") s.nx = parse_int(key, value);
    else if (key == "ny") s.ny = parse_int(key, value);
    else if (key == "box.lo") s.box.lo = parse_double(key, value);
    else if (key == "box.hi") s.box.hi = parse_double(key, value);
    else if (key == "dt_factor") s.dt_factor = parse_double(key, value);
    else if (key == "x.lo") s.lo[0] = parse_double(key, value);
    else if (key == "x.hi") s.hi[0] = parse_double(key, value);
    else if (key == "y.lo") s.lo[1] = parse_double(key, value);
    else if (key == "y.hi") s.hi[1] = parse_double(key, value);
    else if (key == "bubble.rho0") s.bubble.rho0 = parse_double(key, value);
    else if (key == "bubble.amplitude") s.bubble.amplitude = parse_double(key, value);
    else if (key == "bubble.sharpness") s.bubble.sharpness = parse_double(key, value);
    else if (key == "bubble.cx") s.bubble.center[0] = parse_double(key, value);
    else if (key == "bubble.cy") s.bubble.center[1] = parse_double(key, value);
    else if (key == "bimodal.theta0") s.bimodal.theta0 = parse_double(key, value);
    else if (key == "bimodal.u0") s.bimodal.u0 = parse_double(key, value);
    else if (key == "bimodal.theta1") s.bimodal.theta1 = parse_double(key, value);
    else if (key == "bimodal.u1") s.bimodal.u1 = parse_double(key, value);
    else throw ConfigurationError("unknown case override '" + key + "'");
  }
  if (!(s.kn > 0.0)) throw ConfigurationError("case: kn must be positive");
  if (s.t_end < 0.0) throw ConfigurationError("case: t_end must be non-negative");
  if (s.nx < 1 || s.ny < 1 || s.nodes < 1 || s.reference_nodes < 1) throw ConfigurationError("case: cell and node counts must be positive");
  if (!(s.box.lo < s.box.hi)) throw ConfigurationError("case: empty velocity box");
  if (!(s.lo[0] < s.hi[0]) || (s.dim == 2 && !(s.lo[1] < s.hi[1]))) {
    throw ConfigurationError("case: empty spatial domain");
  }
  if (s.dim == 1) s.ny = 1;

  switch (s.id) {
    case CaseId::kSod:
    case CaseId::kTwoBeam:
      s.inflow = {s.left, s.right, s.left, s.right};
      break;
    case CaseId::kBubble2d: {
      MacroState far;
      far.rho = s.bubble.rho0;
      s.inflow = {far, far, far, far};
      break;
    }
    case CaseId::kBimodal:
      break;
  }
}

std::map<std::string, std::string> to_config(const CaseSpec& s) {
  std::map<std::string, std::string> out{
      {"kn", format(s.kn)},         {"t_end", format(s.t_end)},     {"M", std::to_string(s.moments)},
      {"N", std::to_string(s.nodes)}, {"N_ref", std::to_string(s.reference_nodes)}, {"nx", std::to_string(s.nx)}, {"box.lo", format(s.box.lo)},
      {"box.hi", format(s.box.hi)}, {"dt_factor", format(s.dt_factor)}, {"x.lo", format(s.lo[0])},
      {"x.hi", format(s.hi[0])},
  };
  if (s.dim == 2) {
    out["ny"] = std::to_string(s.ny);
    out["y.lo"] = format(s.lo[1]);
    out["y.hi"] = format(s.hi[1]);
  }
  if (s.id == CaseId::kBubble2d) {
    out["bubble.rho0"] = format(s.bubble.rho0);
    out["bubble.amplitude"] = format(s.bubble.amplitude);
    out["bubble.sharpness"] = format(s.bubble.sharpness);
    out["bubble.cx"] = format(s.bubble.center[0]);
    out["bubble.cy"] = format(s.bubble.center[1]);
  }
  if (s.id == CaseId::kBimodal) {
    out["bimodal.theta0"] = format(s.bimodal.theta0);
    out["bimodal.u0"] = format(s.bimodal.u0);
    out["bimodal.theta1"] = format(s.bimodal.theta1);
    out["bimodal.u1"] = format(s.bimodal.u1);
  }
  return out;
}

std::shared_ptr<const VelocityGrid> make_grid(const CaseSpec& spec, int nodes, VelocityBox box) {
  return std::make_shared<const VelocityGrid>(tensor_grid(gauss_legendre(nodes, box.lo, box.hi), spec.dim));
}

BoundaryData make_boundary(const CaseSpec& spec, const VelocityGrid& grid) {
  if (spec.id == CaseId::kBimodal) throw ConfigurationError("bimodal case has no boundary data");
  return make_boundary(grid, spec.inflow);
}

double case_time_step(const CaseSpec& spec, const VelocityGrid& grid) {
  if (spec.dt_factor <= 0.0) return 0.0;
  const Mesh mesh = spec.mesh();
  const double h = spec.dim == 1 ? mesh.dx() : std::min(mesh.dx(), mesh.dy());
  double speed = 0.0;
  for (int d = 0; d < grid.dim(); ++d) speed = std::max(speed, grid.box(d).max_speed());
  return spec.dt_factor * h / speed;
}

std::array<VelocityBox, 2> velocity_cutoff(const std::vector<MacroState>& samples, int dim, double c) {
  if (samples.empty()) throw InvalidArgument("velocity_cutoff: no samples");
  if (!(c > 0.0)) throw InvalidArgument("velocity_cutoff: c must be positive");
  std::array<VelocityBox, 2> out;
  for (int d = 0; d < dim; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const MacroState& m : samples) {
      if (!(m.theta > 0.0)) throw NonPhysicalState("velocity_cutoff: non-positive temperature");
      lo = std::min(lo, m.v[d] - c * std::sqrt(m.theta));
      hi = std::max(hi, m.v[d] + c * std::sqrt(m.theta));
    }
    out[d] = {lo, hi};
  }
  return out;
}

std::array<VelocityBox, 2> velocity_cutoff(const CaseSpec& spec, double c) {
  if (spec.id == CaseId::kBimodal) {
    const MacroState a{1.0, {spec.bimodal.u0, 0.0}, spec.bimodal.theta0};
    const MacroState b{1.0, {spec.bimodal.u1, 0.0}, spec.bimodal.theta1};
    return velocity_cutoff({a, b}, 1, c);
  }
  const Mesh mesh = spec.mesh();
  std::vector<MacroState> samples(spec.inflow.begin(), spec.inflow.begin() + 2 * spec.dim);
  for (int i = 0; i < mesh.nx; ++i) {
    for (int j = 0; j < mesh.ny; ++j) {
      samples.push_back(spec.initial_state(mesh.center(0, i), spec.dim == 2 ? mesh.center(1, j) : 0.0));
    }
  }
  return velocity_cutoff(samples, spec.dim, c);
}

double error_highest_moment(const MomentBasis& basis, const WeightVector& f, const WeightVector& f_m) {
  if (basis.dim() != 1) throw InvalidArgument("error_highest_moment: 1D only");
  if (f.size() != basis.node_count() || f_m.size() != basis.node_count()) {
    throw InvalidArgument("error_highest_moment: wrong length");
  }
  const Eigen::ArrayXd xi_m = basis.Xi(0).array().pow(basis.order());
  const Eigen::ArrayXd l = basis.L().array();
  const double denom = (xi_m * l * f.array()).sum();
  if (!(std::abs(denom) >= 1e-14)) throw InvalidArgument("error_highest_moment: reference moment vanishes");
  return std::abs((xi_m * l * (f_m - f).array()).sum() / denom);
}

double relative_l2_node_error(const VelocityGrid& grid, const WeightVector& f, const WeightVector& approx) {
  if (f.size() != grid.size() || approx.size() != grid.size()) throw InvalidArgument("relative_l2_node_error: wrong length");
  const double denom = grid.weights().dot(f.cwiseAbs2());
  if (!(denom > 0.0)) throw InvalidArgument("relative_l2_node_error: zero reference");
  return std::sqrt(grid.weights().dot((approx - f).cwiseAbs2()) / denom);
}

Eigen::MatrixXd restrict_field(const Mesh& fine, const Eigen::MatrixXd& field, const Mesh& coarse) {
  if (fine.dim != coarse.dim || field.cols() != fine.cells() || fine.nx % coarse.nx != 0 || fine.ny % coarse.ny != 0) {
    throw InvalidArgument("restrict_field: coarse mesh does not divide the fine mesh");
  }
  const int kx = fine.nx / coarse.nx;
  const int ky = fine.ny / coarse.ny;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(field.rows(), coarse.cells());
  for (int i = 0; i < fine.nx; ++i) {
    for (int j = 0; j < fine.ny; ++j) out.col(coarse.index(i / kx, j / ky)) += field.col(fine.index(i, j));
  }
  return out / static_cast<double>(kx * ky);
}

double error_conserved(const Mesh& mesh, const Eigen::MatrixXd& approx, const Eigen::MatrixXd& reference) {
  if (approx.rows() != reference.rows() || approx.cols() != reference.cols() || approx.cols() != mesh.cells()) {
    throw InvalidArgument("error_conserved: mesh mismatch");
  }
  const double h = cell_volume(mesh);
  const double denom = std::sqrt(h * reference.squaredNorm());
  if (!(denom > 0.0)) throw InvalidArgument("error_conserved: zero reference norm");
  return std::sqrt(h * (approx - reference).squaredNorm()) / denom;
}

std::vector<ErrorReport> error_macro(const Mesh& mesh, const Eigen::MatrixXd& approx, const Eigen::MatrixXd& reference) {
  const int dim = mesh.dim;
  if (approx.rows() != dim + 2) throw InvalidArgument("error_macro: expected dim + 2 conserved rows");
  std::vector<ErrorReport> out;
  out.push_back({"E_cons", error_conserved(mesh, approx, reference)});
  const Eigen::MatrixXd pa = primitive(dim, approx);
  const Eigen::MatrixXd pr = primitive(dim, reference);
  const double h = cell_volume(mesh);
  auto rel = [&](int row) {
    const double denom = l2(pr.row(row).transpose(), h);
    const double num = l2((pa.row(row) - pr.row(row)).transpose(), h);
    if (denom > 0.0) return num / denom;
    if (num == 0.0) return 0.0;
    throw InvalidArgument("error_macro: zero reference norm");
  };
  out.push_back({"rho", rel(0)});
  if (dim == 1) {
    out.push_back({"v", rel(1)});
  } else {
    out.push_back({"v1", rel(1)});
    out.push_back({"v2", rel(2)});
  }
  out.push_back({"theta", rel(dim + 1)});
  return out;
}

}  // namespace posmom
