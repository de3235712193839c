#pragma once

#include <functional>

#include "ltqd/hs.hpp"
#include "ltqd/spectral.hpp"
#include "ltqd/superop.hpp"
#include "ltqd/types.hpp"

namespace ltqd {

// ---------------------------------------------------------------------------
// Driven two-level models with analytically known generator spectra.
//
// Both models are single-qubit Lindblad generators expressed on the
// {identity, sigma_x, sigma_y, sigma_z} coherence-vector basis, so every
// superoperator here is 4x4.  Each model provides:
//   * the slow drive generator (closed form),
//   * its eigenvector path with analytic derivatives,
//   * the counterdiabatic correction (closed form),
//   * a phase-generalized shortcut family and the distinguished member used
//     for the dissipative shortcut,
//   * jump-operator realizations of the shortcut generators,
//   * the slow-drive reference solution and the end-of-protocol target.
// ---------------------------------------------------------------------------

// --- Interferometric flip model --------------------------------------------

// Two-branch phase-flip drive: a function-register pair (f0, f1) selects the
// winding F = 1 - (-1)^(f0+f1), i.e. F = 0 when the branches agree and F = 2
// when they differ.  The transverse field rotates by phi(t) = F*pi*t/(2*tau)
// while a constant-rate phase-damping channel acts along z.
struct DeutschParams {
  double omega = 1.0;    // transverse field strength (rad/time), > 0
  double gamma0 = 0.05;  // phase-damping rate, >= 0
  double tau = 10.0;     // protocol duration, > 0
  int f0 = 0;            // branch bit, 0 or 1
  int f1 = 1;            // branch bit, 0 or 1

  // Throws ContractError on invalid entries; throws ExceptionalPointError
  // when gamma0 is within a relative margin of 1e-6 of the spectral
  // degeneracy at gamma0 = 2*omega.
  void validate() const;

  int winding() const { return 1 - (((f0 + f1) % 2 == 0) ? 1 : -1); }
  double phi_dot() const;          // F*pi/(2*tau)
  double phase(double t) const;    // phi(t)
  double gc(double t) const;       // cos(phi)
  double gs(double t) const;       // sin(phi)
  Complex delta() const;           // sqrt(gamma0^2 - 4 omega^2), principal
  Complex delta_plus() const;      // -gamma0 + delta()
  Complex delta_minus() const;     // -gamma0 - delta()
};

// Drive Hamiltonian -omega*(gc(t) sigma_x - gs(t) sigma_y) (units hbar = 1).
Mat deutsch_hamiltonian(const DeutschParams& p, double t);

// Counterdiabatic Hamiltonian -(F*pi/(4*tau)) sigma_z (time independent).
Mat deutsch_cd_hamiltonian(const DeutschParams& p);

// Jump-operator description of the slow drive: the Hamiltonian above plus a
// sigma_z channel at constant rate gamma0.
LindbladSpec deutsch_spec(const DeutschParams& p);

// Closed-form coherence-vector generator of the slow drive.
Superop deutsch_lindbladian(const DeutschParams& p);

// Closed-form counterdiabatic correction: phi_dot * (|x><y| - |y><x|) on the
// coherence-vector components, i.e. the vectorized commutator with the
// counterdiabatic Hamiltonian.
Superop deutsch_standard_cd(const DeutschParams& p);

// Eigenvector path of the slow-drive generator with analytic eigenvalues
// {0, -2*gamma0, delta_minus, delta_plus}, analytic left/right vectors, and
// analytic time derivatives.
SpectralPath deutsch_analytic_spectrum(const DeutschParams& p,
                                       const TimeGrid& grid);

// Companion phase: the unique theta3 for which the phase-generalized
// generator with pinned phases (0, -2*gamma0, theta2, theta3) becomes
// time independent in its coherence-damping block.
Complex deutsch_theta3_companion(const DeutschParams& p, Complex theta2);

// One-parameter time-independent-capable shortcut family: phases
// (0, -2*gamma0, theta2(t), companion(theta2(t))).
Superop deutsch_generalized(const DeutschParams& p,
                            std::function<Complex(double)> theta2);

// Two-parameter shortcut family with both free phases explicit.  Matches
// deutsch_generalized when theta3 is the companion of theta2.
Superop deutsch_generalized_free(const DeutschParams& p,
                                 std::function<Complex(double)> theta2,
                                 std::function<Complex(double)> theta3);

// The four drives actually run for this model, plus reference solutions.
struct DeutschVariants {
  Superop L_adiabatic;          // slow drive
  Superop L_standard_tqd;       // slow drive + counterdiabatic correction
  Superop L_generalized_ti;     // time-independent shortcut (theta2 = -2*gamma0)
  LindbladSpec standard_tqd_spec;    // jump-operator form of L_standard_tqd
  LindbladSpec generalized_ti_spec;  // jump-operator form of L_generalized_ti:
                                     // cd Hamiltonian + x,y,z channels at gamma0/2
  Vec initial_state;            // vectorized (|0>+|1>)(<0|+<1|)/2 = [1,1,0,0]
  std::function<Vec(double)> adiabatic_solution;  // slow-drive reference
  Vec target_state;             // adiabatic_solution(tau)
};
DeutschVariants deutsch_variants(const DeutschParams& p);

// --- Avoided-crossing sweep model ------------------------------------------

enum class GammaMode {
  constant,   // gamma(t) = gamma0
  sec_theta,  // gamma(t) = gamma0 / cos(theta(t))
};

// Longitudinal field omega0 with a transverse ramp omega0*tan(theta(t)) and a
// sigma_y dephasing channel.  The mixing angle follows theta(t) = theta0*t/tau
// unless a custom schedule (with its rate) is supplied.
struct LZParams {
  double omega0 = 1.0;   // longitudinal field (rad/time), > 0
  double gamma0 = 0.05;  // base damping rate, >= 0
  double tau = 10.0;     // protocol duration, > 0
  double theta0 = 1.0;   // final mixing angle, in [0, pi/2)
  GammaMode gamma_mode = GammaMode::sec_theta;

  // Optional custom schedule; both must be set together.  The schedule must
  // start at theta(0) = 0 and stay inside [0, pi/2) on [0, tau].
  std::function<double(double)> theta_fn;      // theta(t)
  std::function<double(double)> theta_dot_fn;  // d theta / dt

  // Throws ContractError on invalid entries; throws ExceptionalPointError
  // when gamma(t)*cos(theta(t)) comes within a relative margin of 1e-6 of
  // omega0 anywhere on a dense probe of [0, tau].
  void validate() const;

  double theta(double t) const;
  double theta_dot(double t) const;
  double gamma(double t) const;
  double gamma_dot(double t) const;
  // Accumulated damping integral int_0^t gamma.  Closed form for the default
  // schedule in both modes; composite Simpson for custom schedules.
  double gamma_integral(double t) const;
  bool has_custom_schedule() const { return static_cast<bool>(theta_fn); }
};

// Average of sec(theta) over a linear ramp from 0 to theta0, i.e.
// ln(sec(theta0) + tan(theta0)) / theta0.  Controls the accumulated damping
// exponent of the slow-passage solution at t = tau in sec_theta mode.
double lz_sec_average(double theta0);

// Average of tan(theta) over the same ramp, i.e. -ln(cos(theta0))/theta0.
// Not the decay exponent of any solution here (the damping rate is
// gamma0*sec(theta), so the exponent averages sec, not tan); exposed so the
// two ramp averages can be compared directly.
double lz_tan_average(double theta0);

// Drive Hamiltonian (omega0/2) sigma_z + (omega0 tan(theta)/2) sigma_x.
Mat lz_hamiltonian(const LZParams& p, double t);

// Counterdiabatic Hamiltonian (theta_dot/2) sigma_y.
Mat lz_cd_hamiltonian(const LZParams& p, double t);

// Jump-operator description of the slow drive: the Hamiltonian above plus a
// sigma_y channel at rate gamma(t).
LindbladSpec lz_spec(const LZParams& p);

// Closed-form coherence-vector generator of the slow drive.
Superop lz_lindbladian(const LZParams& p);

// Closed-form counterdiabatic correction.  In sec_theta mode this is the
// antisymmetric rotation generator theta_dot * (|x><z| - |z><x|); in constant
// mode it additionally carries symmetric x-y and y-z couplings proportional
// to omega0 * varpi * cos^2(theta) / (2 kappa^2) with
// varpi = gamma*theta_dot*tan(theta) - gamma_dot.
Superop lz_standard_cd(const LZParams& p);

// Eigenvector path of the slow-drive generator with analytic eigenvalues
// {0, -2*gamma, -gamma - kappa/cos(theta), -gamma + kappa/cos(theta)} where
// kappa^2 = gamma^2 cos^2(theta) - omega0^2, analytic left/right vectors,
// and analytic time derivatives.
SpectralPath lz_analytic_spectrum(const LZParams& p, const TimeGrid& grid);

// Transported-overlap corrections (G_alpha = <<E_alpha | D_alpha_dot>>) for
// the four branches at time t: [0, 0, G2, G3].  Identically zero in
// sec_theta mode.
Vec lz_transport_corrections(const LZParams& p, double t);

// Time-independent-damping shortcut generator (sec_theta mode only):
// phases (0, -2*gamma, -2*gamma, -2*gamma) with gamma = gamma0/cos(theta),
// giving isotropic damping plus the theta_dot rotation block.
Superop lz_generalized(const LZParams& p);

// The four drives actually run for this model, plus reference solutions.
// Requires gamma_mode == sec_theta (throws ContractError otherwise, since
// the shortcut construction relies on vanishing transport corrections).
struct LZVariants {
  Superop L_adiabatic;      // slow sweep
  Superop L_standard_tqd;   // slow sweep + counterdiabatic correction
  Superop L_generalized;    // isotropic-damping shortcut
  LindbladSpec standard_tqd_spec;  // jump-operator form of L_standard_tqd
  LindbladSpec generalized_spec;   // jump-operator form of L_generalized:
                                   // cd Hamiltonian + x,y,z channels at
                                   // gamma0/(2 cos(theta)) each
  Vec initial_state;        // vectorized |1><1| = [1,0,0,-1]
  std::function<Vec(double)> adiabatic_solution;  // slow-sweep reference
  Vec target_state;         // adiabatic_solution(tau)
};
LZVariants lz_variants(const LZParams& p);

}  // namespace ltqd
