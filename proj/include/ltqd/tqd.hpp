#pragma once

#include <functional>
#include <vector>

#include "ltqd/basis.hpp"
#include "ltqd/spectral.hpp"
#include "ltqd/superop.hpp"
#include "ltqd/types.hpp"

namespace ltqd {

// Freely chosen complex phase rates, one map t -> Theta_a(t) per branch.
struct PhaseProfile {
  std::vector<std::function<Complex(double)>> phases;

  int size() const { return static_cast<int>(phases.size()); }
  // Evaluates every phase; throws ContractError on non-finite values.
  Vec at(double t) const;
};

PhaseProfile constant_phases(const Vec& theta);

// Propagator samples along a grid together with the biorthogonally assembled
// inverse (never a numeric matrix inverse for spectral constructions).
struct PropagatorPath {
  TimeGrid grid;
  std::vector<Mat> V;
  std::vector<Mat> V_inv;

  // States V(t_j) x0 along the grid.
  std::vector<Vec> apply(const Vec& x0) const;
};

// Evolution operator of the eigenbranch-following dynamics for a
// diagonalizable path: V(t) = sum_a exp(int Lambda_a) |D_a(t)>><<E_a(t0)|,
// Lambda_a = lambda_a - <<E_a|Ddot_a>>, with phase integrals accumulated by
// the composite trapezoid rule on the grid. V(t0) = identity.
PropagatorPath adiabatic_propagator_1d(const SpectralPath& path);

// Intra-block transport coefficients v(t) of one Jordan block, from the ODE
//   vdot = (N - G(t)) v,  v(t0) = 1,
// where N is the superdiagonal shift (N[n][l] = 1 when n = l-1) and G(t) is
// the intra-block overlap G[n][l] = <<E^n|Ddot^l>>. Integrated by RK4 with
// linear interpolation of G between grid samples. This is the unique
// coefficient path for which vdot v^{-1} = N - G holds along the grid.
std::vector<Mat> block_v_coefficients(const JordanStructure& js, int block);

// Per-block coefficient matrices q and their inverses, sampled on the grid
// (indexed [block][grid point]). Contract: q * q_tilde = identity.
struct BlockCoefficients {
  TimeGrid grid;
  std::vector<std::vector<Mat>> q;
  std::vector<std::vector<Mat>> q_tilde;

  int n_blocks() const { return static_cast<int>(q.size()); }
};

// The branch-following choice q_a = exp(int lambda_a) v_a, q_tilde its
// analytic inverse. Product deviates from identity by < 1e-10 (checked).
BlockCoefficients adiabatic_block_coefficients(const JordanStructure& js);

// Propagator for a general (possibly defective) structure:
// V(t) = sum_a R_a(t) q_a(t) E_a(t0) with the coefficients above.
PropagatorPath adiabatic_propagator_multiblock(const JordanStructure& js);

// Counterdiabatic generator enforcing exact transport along the
// instantaneous (quasi-)eigenbasis, assembled from dyads:
//   1D:          sum_a (|Ddot_a>><<E_a| - G_a |D_a>><<E_a|)
//   multi-block: sum over blocks of (Rdot_a - R_a G_a) E_a
// with G the intra-block overlap. Requires derivatives on the path.
Superop standard_cd(const SpectralPath& path);
Superop standard_cd(const JordanStructure& js);

// The same generator through an independent route: the similarity frame
// C(t) = sum |D>><<sigma| onto fixed unit reference vectors (block-major,
// rank-minor order), whose moving part Cdot^{-1} C = -G picks out the
// off-block overlap coefficients; returns R G_off E. Agrees with
// standard_cd up to rounding.
Superop standard_cd_via_similarity(const SpectralPath& path);
Superop standard_cd_via_similarity(const JordanStructure& js);

// Generalized transitionless generator for a diagonalizable path:
//   L(t) = sum_a (|Ddot_a>><<E_a| + Theta_a(t) |D_a>><<E_a|).
// Theta_a = Lambda_a reproduces the generator of the branch-following
// propagator; other choices trade phase content for drive simplicity.
Superop generalized_tqd_1d(const SpectralPath& path, const PhaseProfile& thetas);

// Multi-block generalization with user-supplied coefficients:
//   L(t) = sum_a (Rdot_a + R_a qdot_a qtilde_a) E_a,
// qdot by the same finite-difference scheme as differentiate_path.
// Throws ContractError when q qtilde deviates from identity beyond 1e-8.
Superop generalized_tqd_multiblock(const JordanStructure& js,
                                   const BlockCoefficients& coeffs);

// Recovers the generator L = Vdot V^{-1} from a propagator path, Vdot by
// central differences (second-order one-sided at the ends). The overload
// taking a PropagatorPath uses its analytically assembled inverse; the
// generic overload samples V on the grid and solves, refusing when the
// condition number exceeds cond_limit (map invertibility lost).
Superop inverse_engineer(const PropagatorPath& prop, double cond_limit = 1e12);
Superop inverse_engineer(const Superop& v, const TimeGrid& grid,
                         double cond_limit = 1e12);

// The phase choice Theta_a(t) = -<<E_a|Ddot_a>> under which the generalized
// generator reduces to the counterdiabatic term alone; when the overlap
// transport condition below holds, that generator is time-independent.
PhaseProfile stationary_drive_phases(const SpectralPath& path);

// Diagnostics for when a time-independent generalized drive exists. For
// every branch pair (b, a), the overlap <<E_b|Ddot_a>> is compared against
//   transport:  its initial value carried by exp(int (G_b - G_a)), and
//   constancy:  a vanishing time derivative (the stricter special case).
struct StationarityReport {
  Eigen::MatrixXd transport_residual;  // per pair, max deviation on the grid
  Eigen::MatrixXd constancy_residual;  // per pair, max |d/dt overlap|
  double max_transport_residual = 0.0;
  double max_constancy_residual = 0.0;
  double tolerance = 0.0;
  bool transport_holds = false;
  bool constancy_holds = false;
};

StationarityReport stationarity_check(const SpectralPath& path, double tol = 1e-6);

// Entrywise max |dL/dt| over the grid (central differences), compared
// against rel_tol times the largest entry of L itself.
struct ConstancyReport {
  double residual = 0.0;        // max entrywise |dL/dt|
  double reference_norm = 0.0;  // max entrywise |L| over the grid
  double tolerance = 0.0;       // rel_tol * reference_norm
  bool is_constant = false;
};

ConstancyReport time_independence_residual(const Superop& op, const TimeGrid& grid,
                                           double rel_tol = 1e-8);

// Smallest eigenvalue of the Choi matrix of the short-time map exp(dt L(t))
// in the computational basis. Diagnostic only: a completely positive map has
// a nonnegative Choi spectrum, so a markedly negative value flags a
// synthesized generator with no dissipative realization at that instant.
double choi_min_eigenvalue(const Superop& op, const OperatorBasis& basis, double t,
                           double dt = 1e-4);

// Closed-system analog on state vectors: from an orthonormal frame |n(t)>,
// its derivative, and real phase rates theta_n, builds the Hermitian
//   H = i sum_n |ndot><n| + sum_n theta_n |n><n|.
// Throws ContractError when the frame is not orthonormal or the derivative
// is inconsistent with unitarity of the frame motion.
Mat closed_generalized_tqd(const std::vector<Vec>& states,
                           const std::vector<Vec>& states_dot,
                           const Eigen::VectorXd& thetas);

}  // namespace ltqd
