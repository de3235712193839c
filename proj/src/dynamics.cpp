#include "ltqd/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ltqd/errors.hpp"
#include "ltqd/hs.hpp"

namespace ltqd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite(const Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag())) return false;
  }
  return true;
}

// One classical RK4 step from t with width h.
Vec rk4_step(const Superop& op, const Vec& x, double t, double h) {
  const Vec k1 = op.at(t) * x;
  const Vec k2 = op.at(t + 0.5 * h) * (x + 0.5 * h * k1);
  const Vec k3 = op.at(t + 0.5 * h) * (x + 0.5 * h * k2);
  const Vec k4 = op.at(t + h) * (x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<Vec> propagate(const Superop& op, const Vec& x0, const TimeGrid& grid) {
  std::vector<Vec> states;
  states.reserve(grid.size());
  states.push_back(x0);
  const double h = grid.dt();
  Vec x = x0;
  for (int j = 0; j < grid.n_steps; ++j) {
    x = rk4_step(op, x, grid.point(j), h);
    if (!finite(x)) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << grid.point(j + 1) << " (step " << (j + 1)
          << " of " << grid.n_steps << "); the generator may be stiff here - retry "
          << "with more steps";
      throw IntegrationError(msg.str());
    }
    states.push_back(x);
  }
  return states;
}

}  // namespace

int default_steps(double t0, double t1, double omega_ref) {
  const double span = std::abs(t1 - t0) * std::abs(omega_ref);
  const int by_span = static_cast<int>(std::ceil(400.0 * span));
  return std::max(4000, by_span);
}

Trajectory integrate(const Superop& op, const Vec& x0, const TimeGrid& grid,
                     const OperatorBasis& basis, const IntegrateOptions& opts) {
  if (x0.size() != op.dim_sq()) {
    throw DimensionError("integrate: state length " + std::to_string(x0.size()) +
                         " does not match generator dimension " +
                         std::to_string(op.dim_sq()));
  }
  if (grid.n_steps < 1) throw ContractError("integrate: grid needs at least one step");

  Trajectory traj;
  traj.grid = grid;
  traj.states = propagate(op, x0, grid);

  const double c0_initial = std::abs(x0[0]);
  const bool unit_trace = std::abs(x0[0] - Complex(1.0, 0.0)) < 1e-9;

  traj.trace_dev.reserve(grid.size());
  traj.min_eig.reserve(grid.size());
  traj.purity.reserve(grid.size());
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    const Vec& x = traj.states[j];
    const double dev = std::abs(std::abs(x[0]) - c0_initial);
    traj.trace_dev.push_back(dev);
    if (dev > opts.trace_tol) {
      std::ostringstream msg;
      msg << "trace component drifted by " << dev << " (tolerance " << opts.trace_tol
          << ") at t = " << grid.point(static_cast<int>(j))
          << "; the step size is too coarse for this generator";
      throw IntegrationError(msg.str());
    }
    if (opts.with_monitors && unit_trace) {
      const Mat rho = matrix_from_components(x, basis);
      const Mat herm = 0.5 * (rho + rho.adjoint());
      Eigen::SelfAdjointEigenSolver<Mat> es(herm);
      traj.min_eig.push_back(es.eigenvalues().minCoeff());
      traj.purity.push_back((herm * herm).trace().real());
    } else {
      traj.min_eig.push_back(kNaN);
      traj.purity.push_back(kNaN);
    }
  }

  if (opts.self_check) {
    TimeGrid fine{grid.t0, grid.t1, 2 * grid.n_steps};
    const std::vector<Vec> fine_states = propagate(op, x0, fine);
    double delta = 0.0;
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
      const Vec diff = fine_states[2 * j] - traj.states[j];
      delta = std::max(delta, diff.cwiseAbs().maxCoeff());
    }
    traj.self_check_delta = delta;
    if (delta > opts.self_check_tol) {
      std::ostringstream msg;
      msg << "step-halving changed the trajectory by " << delta << " (tolerance "
          << opts.self_check_tol << "); increase the step count";
      throw IntegrationError(msg.str());
    }
  }

  return traj;
}

double fidelity(const Mat& rho, const Mat& target) {
  if (rho.rows() != rho.cols() || target.rows() != target.cols() ||
      rho.rows() != target.rows()) {
    throw DimensionError("fidelity: operands must be square with matching sizes");
  }

  auto clean = [](const Mat& m, const char* which) -> Mat {
    Mat herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm);
    Eigen::VectorXd vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      if (vals[i] < 0.0) {
        if (vals[i] < -1e-8) {
          std::ostringstream msg;
          msg << which << " has eigenvalue " << vals[i]
              << " below -1e-8; not a physical state";
          throw InvalidStateError(msg.str());
        }
        vals[i] = 0.0;
      }
    }
    const double total = vals.sum();
    if (total <= 0.0) throw InvalidStateError(std::string(which) + " has zero trace");
    vals /= total;
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
  };

  const Mat a = clean(rho, "state");
  const Mat b = clean(target, "target");

  Eigen::SelfAdjointEigenSolver<Mat> es_a(a);
  Eigen::VectorXd root_vals = es_a.eigenvalues();
  for (Eigen::Index i = 0; i < root_vals.size(); ++i) {
    root_vals[i] = std::sqrt(std::max(0.0, root_vals[i]));
  }
  const Mat sqrt_a =
      es_a.eigenvectors() * root_vals.asDiagonal() * es_a.eigenvectors().adjoint();

  const Mat inner = sqrt_a * b * sqrt_a;
  Eigen::SelfAdjointEigenSolver<Mat> es_inner(0.5 * (inner + inner.adjoint()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es_inner.eigenvalues().size(); ++i) {
    sum += std::sqrt(std::max(0.0, es_inner.eigenvalues()[i]));
  }
  return std::min(1.0, sum);
}

Eigen::Vector3d bloch_vector(const Mat& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw DimensionError("bloch_vector: expects a 2x2 density matrix");
  }
  const OperatorBasis basis = OperatorBasis::pauli();
  Eigen::Vector3d out;
  for (int n = 1; n < 4; ++n) {
    out[n - 1] = (rho * basis.element(n).adjoint()).trace().real();
  }
  return out;
}

double purity(const Mat& rho) {
  if (rho.rows() != rho.cols()) throw DimensionError("purity: matrix must be square");
  return (rho * rho).trace().real();
}

}  // namespace ltqd
