#include "ltqd/tqd.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <sstream>

#include "ltqd/errors.hpp"
#include "ltqd/hs.hpp"

namespace ltqd {

namespace {

// Cumulative composite trapezoid of per-grid-point samples.
std::vector<Complex> cumtrapz(const std::vector<Complex>& f, double h) {
  std::vector<Complex> out(f.size(), Complex(0.0, 0.0));
  for (std::size_t j = 1; j < f.size(); ++j) {
    out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
  }
  return out;
}

// Same finite-difference scheme as differentiate_path: central differences
// in the interior, second-order one-sided stencils at the ends.
std::vector<Mat> fd_derivative(const std::vector<Mat>& m, double h) {
  const int n = static_cast<int>(m.size());
  if (n < 3) throw ContractError("finite differences need at least three grid points");
  std::vector<Mat> d(n);
  d[0] = (-3.0 * m[0] + 4.0 * m[1] - m[2]) / (2.0 * h);
  for (int j = 1; j + 1 < n; ++j) d[j] = (m[j + 1] - m[j - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * m[n - 1] - 4.0 * m[n - 2] + m[n - 3]) / (2.0 * h);
  return d;
}

void require_derivatives(bool present, const char* who) {
  if (!present) {
    throw ContractError(std::string(who) +
                        ": path has no derivatives; run differentiate_path first");
  }
}

double cond_number(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const double smin = svd.singularValues().minCoeff();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return svd.singularValues().maxCoeff() / smin;
}

// Superdiagonal shift: N[n][l] = 1 when n = l - 1.
Mat shift_matrix(int k) {
  Mat n = Mat::Zero(k, k);
  for (int i = 0; i + 1 < k; ++i) n(i, i + 1) = Complex(1.0, 0.0);
  return n;
}

// Scaling-and-squaring Taylor exponential; adequate for the short-time and
// small-norm arguments used here.
Mat expm_local(const Mat& a) {
  const double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  Mat b = a;
  if (nrm > 0.5) {
    s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    b = a / std::pow(2.0, s);
  }
  Mat result = Mat::Identity(a.rows(), a.cols()) + b;
  Mat term = b;
  for (int k = 2; k <= 60; ++k) {
    term = (term * b) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

// Intra-block overlap path G_a(t_j) = E_a(t_j) Rdot_a(t_j) for one block.
std::vector<Mat> block_overlap_path(const JordanBlock& b) {
  std::vector<Mat> g(b.rights.size());
  for (std::size_t j = 0; j < b.rights.size(); ++j) g[j] = b.lefts[j] * b.rights_dot[j];
  return g;
}

void check_grid_match(const TimeGrid& a, const TimeGrid& b, const char* who) {
  if (a.t0 != b.t0 || a.t1 != b.t1 || a.n_steps != b.n_steps) {
    throw ContractError(std::string(who) + ": grids do not match");
  }
}

}  // namespace

Vec PhaseProfile::at(double t) const {
  Vec out(size());
  for (int a = 0; a < size(); ++a) {
    const Complex v = phases[static_cast<std::size_t>(a)](t);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "phase " << a << " is non-finite at t = " << t;
      throw ContractError(msg.str());
    }
    out[a] = v;
  }
  return out;
}

PhaseProfile constant_phases(const Vec& theta) {
  PhaseProfile profile;
  for (Eigen::Index a = 0; a < theta.size(); ++a) {
    const Complex value = theta[a];
    profile.phases.push_back([value](double) { return value; });
  }
  return profile;
}

std::vector<Vec> PropagatorPath::apply(const Vec& x0) const {
  std::vector<Vec> out;
  out.reserve(V.size());
  for (const Mat& v : V) out.push_back(v * x0);
  return out;
}

PropagatorPath adiabatic_propagator_1d(const SpectralPath& path) {
  require_derivatives(path.has_derivatives(), "adiabatic_propagator_1d");
  const int n = path.n_branches();
  const int npts = static_cast<int>(path.rights.size());
  const double h = path.grid.dt();

  // Lambda_a(t_j) = lambda_a - <<E_a|Ddot_a>>, integrated cumulatively.
  std::vector<std::vector<Complex>> integral(n);
  for (int a = 0; a < n; ++a) {
    std::vector<Complex> lam(npts);
    for (int j = 0; j < npts; ++j) {
      const Complex g = (path.lefts[j].row(a) * path.rights_dot[j].col(a))(0, 0);
      lam[j] = path.eigenvalues[j](a) - g;
    }
    integral[a] = cumtrapz(lam, h);
  }

  PropagatorPath prop;
  prop.grid = path.grid;
  prop.V.reserve(npts);
  prop.V_inv.reserve(npts);
  for (int j = 0; j < npts; ++j) {
    Vec w(n), w_inv(n);
    for (int a = 0; a < n; ++a) {
      w[a] = std::exp(integral[a][j]);
      w_inv[a] = std::exp(-integral[a][j]);
    }
    prop.V.push_back(path.rights[j] * w.asDiagonal() * path.lefts[0]);
    prop.V_inv.push_back(path.rights[0] * w_inv.asDiagonal() * path.lefts[j]);
  }
  return prop;
}

std::vector<Mat> block_v_coefficients(const JordanStructure& js, int block) {
  if (block < 0 || block >= static_cast<int>(js.blocks.size())) {
    throw DimensionError("block_v_coefficients: block index out of range");
  }
  require_derivatives(js.has_derivatives(), "block_v_coefficients");
  const JordanBlock& b = js.blocks[static_cast<std::size_t>(block)];
  const int k = b.rank();
  const int npts = static_cast<int>(b.rights.size());
  const double h = js.grid.dt();
  const Mat shift = shift_matrix(k);
  const std::vector<Mat> g = block_overlap_path(b);

  auto coeff = [&](int j, double frac) -> Mat {
    // Linear interpolation of N - G between samples j and j+1.
    const Mat gmid = (frac == 0.0) ? g[j]
                     : (frac == 1.0)
                         ? g[j + 1]
                         : Mat((1.0 - frac) * g[j] + frac * g[j + 1]);
    return shift - gmid;
  };

  std::vector<Mat> v;
  v.reserve(npts);
  v.push_back(Mat::Identity(k, k));
  for (int j = 0; j + 1 < npts; ++j) {
    const Mat& x = v.back();
    const Mat k1 = coeff(j, 0.0) * x;
    const Mat k2 = coeff(j, 0.5) * (x + 0.5 * h * k1);
    const Mat k3 = coeff(j, 0.5) * (x + 0.5 * h * k2);
    const Mat k4 = coeff(j, 1.0) * (x + h * k3);
    v.push_back(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  return v;
}

BlockCoefficients adiabatic_block_coefficients(const JordanStructure& js) {
  require_derivatives(js.has_derivatives(), "adiabatic_block_coefficients");
  const double h = js.grid.dt();
  BlockCoefficients out;
  out.grid = js.grid;
  out.q.resize(js.blocks.size());
  out.q_tilde.resize(js.blocks.size());

  for (std::size_t a = 0; a < js.blocks.size(); ++a) {
    const JordanBlock& b = js.blocks[a];
    const int npts = static_cast<int>(b.rights.size());
    const std::vector<Mat> v = block_v_coefficients(js, static_cast<int>(a));
    const std::vector<Complex> phase = cumtrapz(b.eigenvalue, h);

    out.q[a].reserve(npts);
    out.q_tilde[a].reserve(npts);
    for (int j = 0; j < npts; ++j) {
      if (cond_number(v[j]) > 1e12) {
        std::ostringstream msg;
        msg << "block " << a << " transport coefficients are near-singular at t = "
            << js.grid.point(j);
        throw IntegrationError(msg.str());
      }
      const Mat v_inv = v[j].partialPivLu().inverse();
      const Mat q = std::exp(phase[j]) * v[j];
      const Mat q_tilde = std::exp(-phase[j]) * v_inv;
      const double defect =
          (q * q_tilde - Mat::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
      if (defect > 1e-10) {
        std::ostringstream msg;
        msg << "block " << a << " coefficient inverse defect " << defect
            << " exceeds 1e-10 at t = " << js.grid.point(j);
        throw ContractError(msg.str());
      }
      out.q[a].push_back(q);
      out.q_tilde[a].push_back(q_tilde);
    }
  }
  return out;
}

PropagatorPath adiabatic_propagator_multiblock(const JordanStructure& js) {
  const BlockCoefficients coeffs = adiabatic_block_coefficients(js);
  const int npts = js.grid.size();
  const int n = js.dim();

  PropagatorPath prop;
  prop.grid = js.grid;
  prop.V.assign(static_cast<std::size_t>(npts), Mat::Zero(n, n));
  prop.V_inv.assign(static_cast<std::size_t>(npts), Mat::Zero(n, n));
  for (int j = 0; j < npts; ++j) {
    for (std::size_t a = 0; a < js.blocks.size(); ++a) {
      const JordanBlock& b = js.blocks[a];
      prop.V[static_cast<std::size_t>(j)] +=
          b.rights[static_cast<std::size_t>(j)] * coeffs.q[a][static_cast<std::size_t>(j)] * b.lefts[0];
      prop.V_inv[static_cast<std::size_t>(j)] +=
          b.rights[0] * coeffs.q_tilde[a][static_cast<std::size_t>(j)] *
          b.lefts[static_cast<std::size_t>(j)];
    }
  }
  return prop;
}

Superop standard_cd(const SpectralPath& path) {
  require_derivatives(path.has_derivatives(), "standard_cd");
  const int npts = static_cast<int>(path.rights.size());
  std::vector<Mat> samples;
  samples.reserve(npts);
  for (int j = 0; j < npts; ++j) {
    const Mat g = path.lefts[j] * path.rights_dot[j];
    samples.push_back(path.rights_dot[j] * path.lefts[j] -
                      path.rights[j] * g.diagonal().asDiagonal() * path.lefts[j]);
  }
  return Superop::from_grid(path.grid, std::move(samples), "standard_cd");
}

Superop standard_cd(const JordanStructure& js) {
  require_derivatives(js.has_derivatives(), "standard_cd");
  const int npts = js.grid.size();
  const int n = js.dim();
  std::vector<Mat> samples;
  samples.reserve(static_cast<std::size_t>(npts));
  for (int j = 0; j < npts; ++j) {
    Mat l = Mat::Zero(n, n);
    for (const JordanBlock& b : js.blocks) {
      const std::size_t sj = static_cast<std::size_t>(j);
      const Mat g = b.lefts[sj] * b.rights_dot[sj];
      l += (b.rights_dot[sj] - b.rights[sj] * g) * b.lefts[sj];
    }
    samples.push_back(std::move(l));
  }
  return Superop::from_grid(js.grid, std::move(samples), "standard_cd");
}

Superop standard_cd_via_similarity(const JordanStructure& js) {
  require_derivatives(js.has_derivatives(), "standard_cd_via_similarity");
  const int npts = js.grid.size();

  // Block layout of the flattened (block-major, rank-minor) matrices.
  std::vector<int> offsets;
  int total = 0;
  for (const JordanBlock& b : js.blocks) {
    offsets.push_back(total);
    total += b.rank();
  }

  std::vector<Mat> samples;
  samples.reserve(static_cast<std::size_t>(npts));
  for (int j = 0; j < npts; ++j) {
    const Mat c = js.rights_at(j);
    const Mat c_inv = js.lefts_at(j);
    // Moving-frame coefficients: Cdot^{-1} C = -(full overlap); retain only
    // the off-block part before mapping back through the frame.
    Mat g = c_inv * js.rights_dot_at(j);
    for (std::size_t a = 0; a < js.blocks.size(); ++a) {
      const int k = js.blocks[a].rank();
      g.block(offsets[a], offsets[a], k, k).setZero();
    }
    samples.push_back(c * g * c_inv);
  }
  return Superop::from_grid(js.grid, std::move(samples), "standard_cd_similarity");
}

Superop standard_cd_via_similarity(const SpectralPath& path) {
  return standard_cd_via_similarity(JordanStructure::from_path(path));
}

Superop generalized_tqd_1d(const SpectralPath& path, const PhaseProfile& thetas) {
  require_derivatives(path.has_derivatives(), "generalized_tqd_1d");
  if (thetas.size() != path.n_branches()) {
    std::ostringstream msg;
    msg << "generalized_tqd_1d: " << thetas.size() << " phases supplied for "
        << path.n_branches() << " branches";
    throw ContractError(msg.str());
  }
  const int npts = static_cast<int>(path.rights.size());
  std::vector<Mat> samples;
  samples.reserve(npts);
  for (int j = 0; j < npts; ++j) {
    const Vec theta = thetas.at(path.grid.point(j));
    samples.push_back(path.rights_dot[j] * path.lefts[j] +
                      path.rights[j] * theta.asDiagonal() * path.lefts[j]);
  }
  return Superop::from_grid(path.grid, std::move(samples), "generalized_tqd_1d");
}

Superop generalized_tqd_multiblock(const JordanStructure& js,
                                   const BlockCoefficients& coeffs) {
  require_derivatives(js.has_derivatives(), "generalized_tqd_multiblock");
  check_grid_match(js.grid, coeffs.grid, "generalized_tqd_multiblock");
  if (coeffs.n_blocks() != static_cast<int>(js.blocks.size())) {
    throw ContractError("generalized_tqd_multiblock: block count mismatch");
  }
  const int npts = js.grid.size();
  const int n = js.dim();
  const double h = js.grid.dt();

  // Validate the coefficient contract and differentiate each q path.
  std::vector<std::vector<Mat>> q_dot(coeffs.q.size());
  for (std::size_t a = 0; a < coeffs.q.size(); ++a) {
    const int k = js.blocks[a].rank();
    if (static_cast<int>(coeffs.q[a].size()) != npts ||
        static_cast<int>(coeffs.q_tilde[a].size()) != npts) {
      throw ContractError("generalized_tqd_multiblock: coefficient path length mismatch");
    }
    for (int j = 0; j < npts; ++j) {
      const Mat& q = coeffs.q[a][static_cast<std::size_t>(j)];
      const Mat& qt = coeffs.q_tilde[a][static_cast<std::size_t>(j)];
      if (q.rows() != k || q.cols() != k || qt.rows() != k || qt.cols() != k) {
        throw DimensionError("generalized_tqd_multiblock: coefficient shape mismatch");
      }
      const double defect = (q * qt - Mat::Identity(k, k)).cwiseAbs().maxCoeff();
      if (defect > 1e-8) {
        std::ostringstream msg;
        msg << "generalized_tqd_multiblock: q qtilde deviates from identity by "
            << defect << " at t = " << js.grid.point(j) << " (block " << a << ")";
        throw ContractError(msg.str());
      }
    }
    q_dot[a] = fd_derivative(coeffs.q[a], h);
  }

  std::vector<Mat> samples;
  samples.reserve(static_cast<std::size_t>(npts));
  for (int j = 0; j < npts; ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    Mat l = Mat::Zero(n, n);
    for (std::size_t a = 0; a < js.blocks.size(); ++a) {
      const JordanBlock& b = js.blocks[a];
      l += (b.rights_dot[sj] +
            b.rights[sj] * (q_dot[a][sj] * coeffs.q_tilde[a][sj])) *
           b.lefts[sj];
    }
    samples.push_back(std::move(l));
  }
  return Superop::from_grid(js.grid, std::move(samples), "generalized_tqd_multiblock");
}

Superop inverse_engineer(const PropagatorPath& prop, double cond_limit) {
  const int npts = static_cast<int>(prop.V.size());
  if (npts < 3) throw ContractError("inverse_engineer: need at least three samples");
  const double h = prop.grid.dt();
  const std::vector<Mat> v_dot = fd_derivative(prop.V, h);

  std::vector<Mat> samples;
  samples.reserve(prop.V.size());
  for (int j = 0; j < npts; ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    Mat inv;
    if (!prop.V_inv.empty()) {
      inv = prop.V_inv[sj];
    } else {
      const double cond = cond_number(prop.V[sj]);
      if (cond > cond_limit) {
        std::ostringstream msg;
        msg << "inverse_engineer: propagator condition number " << cond
            << " exceeds " << cond_limit << " at t = " << prop.grid.point(j)
            << "; the map is no longer invertible";
        throw IntegrationError(msg.str());
      }
      inv = prop.V[sj].partialPivLu().inverse();
    }
    samples.push_back(v_dot[sj] * inv);
  }
  return Superop::from_grid(prop.grid, std::move(samples), "inverse_engineered");
}

Superop inverse_engineer(const Superop& v, const TimeGrid& grid, double cond_limit) {
  PropagatorPath prop;
  prop.grid = grid;
  prop.V.reserve(grid.size());
  for (int j = 0; j < grid.size(); ++j) prop.V.push_back(v.at(grid.point(j)));
  return inverse_engineer(prop, cond_limit);  // V_inv empty: numeric route
}

PhaseProfile stationary_drive_phases(const SpectralPath& path) {
  require_derivatives(path.has_derivatives(), "stationary_drive_phases");
  const int n = path.n_branches();
  const int npts = static_cast<int>(path.rights.size());

  // Sample -G_a(t_j) once, then interpolate linearly inside each phase map.
  auto samples = std::make_shared<std::vector<std::vector<Complex>>>(
      static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    auto& row = (*samples)[static_cast<std::size_t>(a)];
    row.resize(static_cast<std::size_t>(npts));
    for (int j = 0; j < npts; ++j) {
      row[static_cast<std::size_t>(j)] =
          -(path.lefts[j].row(a) * path.rights_dot[j].col(a))(0, 0);
    }
  }

  const TimeGrid grid = path.grid;
  PhaseProfile profile;
  for (int a = 0; a < n; ++a) {
    profile.phases.push_back([samples, grid, a](double t) -> Complex {
      const auto& row = (*samples)[static_cast<std::size_t>(a)];
      if (t <= grid.t0) return row.front();
      if (t >= grid.t1) return row.back();
      const double u = (t - grid.t0) / (grid.t1 - grid.t0) * grid.n_steps;
      const int j = std::min(static_cast<int>(u), grid.n_steps - 1);
      const double frac = u - j;
      return (1.0 - frac) * row[static_cast<std::size_t>(j)] +
             frac * row[static_cast<std::size_t>(j + 1)];
    });
  }
  return profile;
}

StationarityReport stationarity_check(const SpectralPath& path, double tol) {
  require_derivatives(path.has_derivatives(), "stationarity_check");
  const int n = path.n_branches();
  const int npts = static_cast<int>(path.rights.size());
  const double h = path.grid.dt();

  std::vector<Mat> overlaps;
  overlaps.reserve(npts);
  for (int j = 0; j < npts; ++j) overlaps.push_back(path.lefts[j] * path.rights_dot[j]);
  const std::vector<Mat> overlaps_dot = fd_derivative(overlaps, h);

  // Cumulative integrals of the diagonal overlaps G_a.
  std::vector<std::vector<Complex>> g_int(n);
  for (int a = 0; a < n; ++a) {
    std::vector<Complex> g(npts);
    for (int j = 0; j < npts; ++j) g[static_cast<std::size_t>(j)] = overlaps[j](a, a);
    g_int[static_cast<std::size_t>(a)] = cumtrapz(g, h);
  }

  StationarityReport report;
  report.tolerance = tol;
  report.transport_residual = Eigen::MatrixXd::Zero(n, n);
  report.constancy_residual = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      double rt = 0.0, rc = 0.0;
      const Complex initial = overlaps[0](b, a);
      for (int j = 0; j < npts; ++j) {
        const std::size_t sj = static_cast<std::size_t>(j);
        const Complex transported =
            initial * std::exp(g_int[static_cast<std::size_t>(b)][sj] -
                               g_int[static_cast<std::size_t>(a)][sj]);
        rt = std::max(rt, std::abs(overlaps[j](b, a) - transported));
        rc = std::max(rc, std::abs(overlaps_dot[j](b, a)));
      }
      report.transport_residual(b, a) = rt;
      report.constancy_residual(b, a) = rc;
    }
  }
  report.max_transport_residual = report.transport_residual.maxCoeff();
  report.max_constancy_residual = report.constancy_residual.maxCoeff();
  report.transport_holds = report.max_transport_residual < tol;
  report.constancy_holds = report.max_constancy_residual < tol;
  return report;
}

ConstancyReport time_independence_residual(const Superop& op, const TimeGrid& grid,
                                           double rel_tol) {
  std::vector<Mat> samples;
  samples.reserve(grid.size());
  for (int j = 0; j < grid.size(); ++j) samples.push_back(op.at(grid.point(j)));
  const std::vector<Mat> dots = fd_derivative(samples, grid.dt());

  ConstancyReport report;
  for (const Mat& m : samples) {
    report.reference_norm = std::max(report.reference_norm, m.cwiseAbs().maxCoeff());
  }
  for (const Mat& d : dots) {
    report.residual = std::max(report.residual, d.cwiseAbs().maxCoeff());
  }
  report.tolerance = rel_tol * report.reference_norm;
  report.is_constant = (report.reference_norm == 0.0) ? (report.residual == 0.0)
                                                      : (report.residual < report.tolerance);
  return report;
}

double choi_min_eigenvalue(const Superop& op, const OperatorBasis& basis, double t,
                           double dt) {
  const int d = basis.dim();
  if (op.dim_sq() != d * d) {
    throw DimensionError("choi_min_eigenvalue: generator and basis dimensions differ");
  }
  const Mat map = expm_local(dt * op.at(t));

  Mat choi = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Mat unit = Mat::Zero(d, d);
      unit(i, j) = Complex(1.0, 0.0);
      const Mat image = matrix_from_components(map * vectorize(unit, basis), basis);
      choi.block(i * d, j * d, d, d) += image;
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (choi + choi.adjoint()));
  return es.eigenvalues().minCoeff();
}

Mat closed_generalized_tqd(const std::vector<Vec>& states,
                           const std::vector<Vec>& states_dot,
                           const Eigen::VectorXd& thetas) {
  const std::size_t n = states.size();
  if (n == 0) throw ContractError("closed_generalized_tqd: empty frame");
  if (states_dot.size() != n || static_cast<std::size_t>(thetas.size()) != n) {
    throw DimensionError("closed_generalized_tqd: frame, derivative, and phase "
                         "counts must match");
  }
  const Eigen::Index d = states[0].size();
  for (const Vec& v : states) {
    if (v.size() != d) throw DimensionError("closed_generalized_tqd: ragged frame");
  }
  for (const Vec& v : states_dot) {
    if (v.size() != d) throw DimensionError("closed_generalized_tqd: ragged derivative");
  }

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const Complex g = states[a].dot(states[b]);  // <a|b>, conjugating a
      const double target = (a == b) ? 1.0 : 0.0;
      if (std::abs(g - Complex(target, 0.0)) > 1e-10) {
        throw ContractError("closed_generalized_tqd: frame is not orthonormal");
      }
      // d/dt <a|b> = 0 for an orthonormal frame.
      const Complex drift = states_dot[a].dot(states[b]) + states[a].dot(states_dot[b]);
      if (std::abs(drift) > 1e-8) {
        throw ContractError("closed_generalized_tqd: derivatives are inconsistent "
                            "with an orthonormal frame");
      }
    }
  }

  Mat h = Mat::Zero(d, d);
  const Complex i_unit(0.0, 1.0);
  for (std::size_t a = 0; a < n; ++a) {
    h += i_unit * states_dot[a] * states[a].adjoint();
    h += Complex(thetas[static_cast<Eigen::Index>(a)], 0.0) * states[a] *
         states[a].adjoint();
  }
  return 0.5 * (h + h.adjoint());
}

}  // namespace ltqd
