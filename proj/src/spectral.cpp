#include "ltqd/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ltqd/errors.hpp"

namespace ltqd {

namespace {

double cond_estimate(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Mat invert_checked(const Mat& r, double cond_limit, double t) {
  if (cond_estimate(r) > cond_limit)
    throw ExceptionalPointError(
        "eigenvector matrix numerically defective at t=" + std::to_string(t) +
        " (condition number above " + std::to_string(cond_limit) + ")");
  return r.partialPivLu().solve(Mat::Identity(r.rows(), r.cols()));
}

// Deterministic branch order at the first grid point.
std::vector<int> initial_order(const Vec& ev) {
  std::vector<int> idx(ev.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(ev(a)), mb = std::abs(ev(b));
    if (std::abs(ma - mb) > 1e-14 * std::max(1.0, std::max(ma, mb)))
      return ma < mb;
    if (std::abs(ev(a).real() - ev(b).real()) > 1e-14)
      return ev(a).real() > ev(b).real();
    return ev(a).imag() < ev(b).imag();
  });
  return idx;
}

// Minimal-distance assignment of new eigenvalues to predicted branch values.
// Greedy global-minimum selection; ties between distinct non-degenerate
// branches are ambiguous.
std::vector<int> assign_branches(const Vec& predicted, const Vec& fresh,
                                 const EigenOptions& opt, double t) {
  const int n = static_cast<int>(predicted.size());
  const double scale = std::max(1.0, fresh.cwiseAbs().maxCoeff());
  std::vector<int> match(n, -1);
  std::vector<bool> row_used(n, false), col_used(n, false);
  for (int pick = 0; pick < n; ++pick) {
    double best = std::numeric_limits<double>::infinity();
    int br = -1, bc = -1;
    for (int r = 0; r < n; ++r) {
      if (row_used[r]) continue;
      for (int c = 0; c < n; ++c) {
        if (col_used[c]) continue;
        const double cost = std::abs(fresh(c) - predicted(r));
        if (cost < best) {
          best = cost;
          br = r;
          bc = c;
        }
      }
    }
    // a tie along the chosen row or column is only ambiguous when the
    // competing eigenvalues are not themselves degenerate (clusters are
    // realigned as a subspace later)
    for (int c = 0; c < n; ++c) {
      if (col_used[c] || c == bc) continue;
      if (std::abs(std::abs(fresh(c) - predicted(br)) - best) < opt.ambiguity_tol &&
          std::abs(fresh(c) - fresh(bc)) > opt.cluster_tol * scale)
        throw GaugeAmbiguityError(
            "ambiguous eigenvalue branch assignment at t=" + std::to_string(t) +
            "; refine the grid near this time");
    }
    for (int r = 0; r < n; ++r) {
      if (row_used[r] || r == br) continue;
      if (std::abs(std::abs(fresh(bc) - predicted(r)) - best) < opt.ambiguity_tol &&
          std::abs(predicted(r) - predicted(br)) > opt.cluster_tol * scale)
        throw GaugeAmbiguityError(
            "ambiguous eigenvalue branch assignment at t=" + std::to_string(t) +
            "; refine the grid near this time");
    }
    match[br] = bc;
    row_used[br] = true;
    col_used[bc] = true;
  }
  return match;
}

// Union-find clustering of branches by eigenvalue proximity.
std::vector<std::vector<int>> degenerate_clusters(const Vec& ev, double tol) {
  const int n = static_cast<int>(ev.size());
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (std::abs(ev(a) - ev(b)) <= tol * scale) parent[find(a)] = find(b);
  std::vector<std::vector<int>> groups(n);
  for (int a = 0; a < n; ++a) groups[find(a)].push_back(a);
  std::vector<std::vector<int>> out;
  for (auto& g : groups)
    if (!g.empty()) out.push_back(std::move(g));
  return out;
}

void fix_initial_gauge(Mat& r) {
  for (int c = 0; c < r.cols(); ++c) {
    int imax = 0;
    double amax = 0.0;
    for (int i = 0; i < r.rows(); ++i)
      if (std::abs(r(i, c)) > amax) {
        amax = std::abs(r(i, c));
        imax = i;
      }
    if (amax > 0.0) r.col(c) *= std::abs(r(imax, c)) / r(imax, c);
  }
}

// Derivative of a matrix-valued sample path: central differences inside,
// second-order one-sided at the ends.
std::vector<Mat> fd_path(const std::vector<Mat>& f, double h) {
  const int n = static_cast<int>(f.size());
  std::vector<Mat> d(n);
  if (n < 3) throw DimensionError("differentiate: need at least 3 grid points");
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  for (int j = 1; j < n - 1; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
  return d;
}

}  // namespace

Mat SpectralPath::projector(int j, int alpha) const {
  return rights[j].col(alpha) * lefts[j].row(alpha);
}

double SpectralPath::biorthonormality_residual() const {
  double worst = 0.0;
  const Mat id = Mat::Identity(n_branches(), n_branches());
  for (size_t j = 0; j < rights.size(); ++j)
    worst = std::max(worst, (lefts[j] * rights[j] - id).cwiseAbs().maxCoeff());
  return worst;
}

double SpectralPath::completeness_residual() const {
  double worst = 0.0;
  const Mat id = Mat::Identity(n_branches(), n_branches());
  for (size_t j = 0; j < rights.size(); ++j)
    worst = std::max(worst, (rights[j] * lefts[j] - id).cwiseAbs().maxCoeff());
  return worst;
}

double SpectralPath::max_eigenvalue_jump() const {
  double worst = 0.0;
  for (size_t j = 0; j + 1 < eigenvalues.size(); ++j)
    worst = std::max(worst, (eigenvalues[j + 1] - eigenvalues[j]).cwiseAbs().maxCoeff());
  return worst;
}

SpectralPath eigensystem_path(const Superop& op, const TimeGrid& grid,
                              const EigenOptions& opt) {
  if (grid.n_steps < 2) throw DimensionError("eigensystem_path: need n_steps >= 2");
  SpectralPath path;
  path.grid = grid;
  path.eigenvalues.resize(grid.size());
  path.rights.resize(grid.size());
  path.lefts.resize(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const double t = grid.point(j);
    const Mat m = op.at(t);
    Eigen::ComplexEigenSolver<Mat> es(m);
    if (es.info() != Eigen::Success)
      throw IntegrationError("eigensolver failed at t=" + std::to_string(t));
    path.eigenvalues[j] = es.eigenvalues();
    path.rights[j] = es.eigenvectors();
    if (cond_estimate(path.rights[j]) > opt.cond_limit)
      throw ExceptionalPointError(
          "generator defective (or near-defective) at t=" + std::to_string(t) +
          ": eigenvector condition number above " + std::to_string(opt.cond_limit));
  }
  gauge_smooth(path, opt);
  return path;
}

void gauge_smooth(SpectralPath& path, const EigenOptions& opt) {
  const int npts = static_cast<int>(path.rights.size());
  if (npts == 0) return;
  const int n = path.n_branches();

  // first point: deterministic order + phase gauge
  {
    const auto order = initial_order(path.eigenvalues[0]);
    Vec ev(n);
    Mat r(n, n);
    for (int a = 0; a < n; ++a) {
      ev(a) = path.eigenvalues[0](order[a]);
      r.col(a) = path.rights[0].col(order[a]);
    }
    fix_initial_gauge(r);
    path.eigenvalues[0] = ev;
    path.rights[0] = r;
  }

  for (int j = 1; j < npts; ++j) {
    const double t = path.grid.point(j);
    // slope-extrapolated prediction disambiguates genuine crossings
    Vec predicted = path.eigenvalues[j - 1];
    if (j >= 2) predicted += path.eigenvalues[j - 1] - path.eigenvalues[j - 2];
    const auto match = assign_branches(predicted, path.eigenvalues[j], opt, t);

    Vec ev(n);
    Mat r(n, n);
    for (int a = 0; a < n; ++a) {
      ev(a) = path.eigenvalues[j](match[a]);
      r.col(a) = path.rights[j].col(match[a]);
    }

    // continuity gauge: per-cluster least-squares fit onto the previous
    // vectors (singletons reduce to a complex rescaling)
    for (const auto& cluster : degenerate_clusters(ev, opt.cluster_tol)) {
      const int k = static_cast<int>(cluster.size());
      Mat vnew(n, k), vprev(n, k);
      for (int c = 0; c < k; ++c) {
        vnew.col(c) = r.col(cluster[c]);
        vprev.col(c) = path.rights[j - 1].col(cluster[c]);
      }
      const Mat a = vnew.colPivHouseholderQr().solve(vprev);
      const Mat aligned = vnew * a;
      // keep the raw vectors if the fit collapsed (orthogonal subspace jump)
      if (aligned.colPivHouseholderQr().rank() == k)
        for (int c = 0; c < k; ++c) r.col(cluster[c]) = aligned.col(c);
    }

    path.eigenvalues[j] = ev;
    path.rights[j] = r;
  }

  for (int j = 0; j < npts; ++j)
    path.lefts[j] = invert_checked(path.rights[j], opt.cond_limit, path.grid.point(j));

  // smoothing invalidates any previously computed derivatives
  path.rights_dot.clear();
  path.lefts_dot.clear();
  path.derivative_warning.reset();
}

void differentiate_path(SpectralPath& path) {
  const int npts = static_cast<int>(path.rights.size());
  const double h = path.grid.dt();
  path.rights_dot = fd_path(path.rights, h);
  path.lefts_dot.resize(npts);
  for (int j = 0; j < npts; ++j)
    path.lefts_dot[j] = -path.lefts[j] * path.rights_dot[j] * path.lefts[j];

  // step-doubling consistency estimate on the interior
  if (npts >= 5) {
    double worst = 0.0, scale = 0.0;
    for (int j = 0; j < npts; ++j)
      scale = std::max(scale, path.rights_dot[j].cwiseAbs().maxCoeff());
    for (int j = 2; j < npts - 2; ++j) {
      const Mat coarse = (path.rights[j + 2] - path.rights[j - 2]) / (4.0 * h);
      worst = std::max(worst, (coarse - path.rights_dot[j]).cwiseAbs().maxCoeff());
    }
    if (scale > 0.0 && worst / scale > 1e-5)
      path.derivative_warning =
          "grid too coarse for eigenvector derivatives (step-doubled estimate "
          "deviates by " + std::to_string(worst / scale) + " relative)";
  }
}

Mat overlap_matrix(const SpectralPath& path, int j) {
  if (!path.has_derivatives())
    throw ContractError("overlap_matrix: differentiate_path first");
  return path.lefts[j] * path.rights_dot[j];
}

int JordanStructure::total_rank() const {
  int r = 0;
  for (const auto& b : blocks) r += b.rank();
  return r;
}

int JordanStructure::dim() const {
  return blocks.empty() ? 0 : static_cast<int>(blocks.front().rights.front().rows());
}

bool JordanStructure::has_derivatives() const {
  for (const auto& b : blocks)
    if (b.rights_dot.empty()) return false;
  return !blocks.empty();
}

namespace {

template <typename Getter>
Mat flatten_cols(const JordanStructure& js, int j, Getter get) {
  Mat out(js.dim(), js.total_rank());
  int c = 0;
  for (const auto& b : js.blocks) {
    const Mat& m = get(b, j);
    out.middleCols(c, b.rank()) = m;
    c += b.rank();
  }
  return out;
}

template <typename Getter>
Mat flatten_rows(const JordanStructure& js, int j, Getter get) {
  Mat out(js.total_rank(), js.dim());
  int r = 0;
  for (const auto& b : js.blocks) {
    const Mat& m = get(b, j);
    out.middleRows(r, b.rank()) = m;
    r += b.rank();
  }
  return out;
}

}  // namespace

Mat JordanStructure::rights_at(int j) const {
  return flatten_cols(*this, j, [](const JordanBlock& b, int jj) -> const Mat& { return b.rights[jj]; });
}
Mat JordanStructure::lefts_at(int j) const {
  return flatten_rows(*this, j, [](const JordanBlock& b, int jj) -> const Mat& { return b.lefts[jj]; });
}
Mat JordanStructure::rights_dot_at(int j) const {
  return flatten_cols(*this, j, [](const JordanBlock& b, int jj) -> const Mat& { return b.rights_dot[jj]; });
}
Mat JordanStructure::lefts_dot_at(int j) const {
  return flatten_rows(*this, j, [](const JordanBlock& b, int jj) -> const Mat& { return b.lefts_dot[jj]; });
}

JordanStructure JordanStructure::from_path(const SpectralPath& path) {
  JordanStructure js;
  js.grid = path.grid;
  const int n = path.n_branches();
  const int npts = static_cast<int>(path.rights.size());
  js.blocks.resize(n);
  for (int a = 0; a < n; ++a) {
    auto& b = js.blocks[a];
    b.eigenvalue.resize(npts);
    b.rights.resize(npts);
    b.lefts.resize(npts);
    if (path.has_derivatives()) {
      b.rights_dot.resize(npts);
      b.lefts_dot.resize(npts);
    }
    for (int j = 0; j < npts; ++j) {
      b.eigenvalue[j] = path.eigenvalues[j](a);
      b.rights[j] = path.rights[j].col(a);
      b.lefts[j] = path.lefts[j].row(a);
      if (path.has_derivatives()) {
        b.rights_dot[j] = path.rights_dot[j].col(a);
        b.lefts_dot[j] = path.lefts_dot[j].row(a);
      }
    }
  }
  return js;
}

double JordanStructure::biorthonormality_residual() const {
  if (blocks.empty()) return 0.0;
  const int npts = static_cast<int>(blocks.front().rights.size());
  const Mat id = Mat::Identity(total_rank(), total_rank());
  double worst = 0.0;
  for (int j = 0; j < npts; ++j)
    worst = std::max(worst, (lefts_at(j) * rights_at(j) - id).cwiseAbs().maxCoeff());
  return worst;
}

QuasiEigenReport check_quasi_eigen(const Superop& op, const JordanStructure& js, int j) {
  const Mat m = op.at(js.grid.point(j));
  QuasiEigenReport rep;
  for (const auto& b : js.blocks) {
    const int k = b.rank();
    const Complex lam = b.eigenvalue[j];
    for (int r = 0; r < k; ++r) {
      // rights lower rank: L D^n = D^{n-1} + lambda D^n
      Vec resid = m * b.rights[j].col(r) - lam * b.rights[j].col(r);
      if (r > 0) resid -= b.rights[j].col(r - 1);
      rep.right_residual = std::max(rep.right_residual, resid.cwiseAbs().maxCoeff());
      // lefts raise rank: E^n L = E^{n+1} + lambda E^n
      Vec lres = (b.lefts[j].row(r) * m).transpose() - lam * b.lefts[j].row(r).transpose();
      if (r + 1 < k) lres -= b.lefts[j].row(r + 1).transpose();
      rep.left_residual = std::max(rep.left_residual, lres.cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

}  // namespace ltqd
