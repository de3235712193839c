#pragma once

#include <vector>

#include "ltqd/basis.hpp"
#include "ltqd/superop.hpp"
#include "ltqd/types.hpp"

namespace ltqd {

struct IntegrateOptions {
  bool with_monitors = true;     // reconstruct rho per point for diagnostics
  double trace_tol = 1e-6;       // hard error on trace-component drift
  bool self_check = false;       // re-run at doubled resolution and compare
  double self_check_tol = 1e-8;  // max-norm bound on the halved-step change
};

// Default step count for a window: at least 4000 steps, at least 400 per
// unit of omega_ref * (t1 - t0).
int default_steps(double t0, double t1, double omega_ref = 1.0);

struct Trajectory {
  TimeGrid grid;
  std::vector<Vec> states;        // per grid point; states[0] = initial vector
  std::vector<double> trace_dev;  // |c0(t) - c0(0)|
  std::vector<double> min_eig;    // NaN when the initial vector is not unit trace
  std::vector<double> purity;     // NaN likewise
  double self_check_delta = 0.0;  // filled in self-check mode
};

// Classical fixed-step RK4 on d/dt x = L(t) x over the grid. Throws
// IntegrationError on non-finite values (suggesting a smaller step) and on
// trace-component drift beyond opts.trace_tol.
Trajectory integrate(const Superop& op, const Vec& x0, const TimeGrid& grid,
                     const OperatorBasis& basis, const IntegrateOptions& opts = {});

// Uhlmann fidelity Tr sqrt(sqrt(rho) target sqrt(rho)) via Hermitian
// eigen-decompositions. Eigenvalues in [-1e-8, 0) are clamped to zero and the
// state renormalized; below that, InvalidStateError.
double fidelity(const Mat& rho, const Mat& target);

// (Tr{rho sx}, Tr{rho sy}, Tr{rho sz}) for D = 2.
Eigen::Vector3d bloch_vector(const Mat& rho);

// Tr{rho^2}.
double purity(const Mat& rho);

}  // namespace ltqd
