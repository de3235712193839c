#include "ltqd/models.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <utility>

#include "ltqd/errors.hpp"

namespace ltqd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEpRelMargin = 1e-6;
constexpr Complex kI{0.0, 1.0};

Mat sigma_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat sigma_y() {
  Mat m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Mat sigma_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

// --- Interferometric flip model --------------------------------------------

void DeutschParams::validate() const {
  if (!(omega > 0.0)) throw ContractError("DeutschParams: omega must be > 0");
  if (!(tau > 0.0)) throw ContractError("DeutschParams: tau must be > 0");
  if (!(gamma0 >= 0.0)) throw ContractError("DeutschParams: gamma0 must be >= 0");
  if ((f0 != 0 && f0 != 1) || (f1 != 0 && f1 != 1)) {
    throw ContractError("DeutschParams: f0 and f1 must be 0 or 1");
  }
  const double margin = std::abs(gamma0 - 2.0 * omega) / (2.0 * omega);
  if (margin <= kEpRelMargin) {
    std::ostringstream msg;
    msg << "DeutschParams: gamma0 = " << gamma0
        << " is within relative margin " << kEpRelMargin
        << " of the spectral degeneracy at 2*omega = " << 2.0 * omega
        << "; the eigenvector basis is (near-)defective there";
    throw ExceptionalPointError(msg.str());
  }
}

double DeutschParams::phi_dot() const { return winding() * kPi / (2.0 * tau); }

double DeutschParams::phase(double t) const { return phi_dot() * t; }

double DeutschParams::gc(double t) const { return std::cos(phase(t)); }

double DeutschParams::gs(double t) const { return std::sin(phase(t)); }

Complex DeutschParams::delta() const {
  return std::sqrt(Complex(gamma0 * gamma0 - 4.0 * omega * omega, 0.0));
}

Complex DeutschParams::delta_plus() const { return -gamma0 + delta(); }

Complex DeutschParams::delta_minus() const { return -gamma0 - delta(); }

Mat deutsch_hamiltonian(const DeutschParams& p, double t) {
  return -p.omega * p.gc(t) * sigma_x() + p.omega * p.gs(t) * sigma_y();
}

Mat deutsch_cd_hamiltonian(const DeutschParams& p) {
  return -(p.phi_dot() / 2.0) * sigma_z();
}

LindbladSpec deutsch_spec(const DeutschParams& p) {
  p.validate();
  LindbladSpec spec;
  spec.hamiltonian = [p](double t) { return deutsch_hamiltonian(p, t); };
  spec.channels.push_back({sigma_z(), [g = p.gamma0](double) { return g; }});
  return spec;
}

Superop deutsch_lindbladian(const DeutschParams& p) {
  p.validate();
  auto fn = [p](double t) {
    const double gc = p.gc(t);
    const double gs = p.gs(t);
    Mat m = Mat::Zero(4, 4);
    m(1, 1) = -2.0 * p.gamma0;
    m(1, 3) = 2.0 * p.omega * gs;
    m(2, 2) = -2.0 * p.gamma0;
    m(2, 3) = 2.0 * p.omega * gc;
    m(3, 1) = -2.0 * p.omega * gs;
    m(3, 2) = -2.0 * p.omega * gc;
    return m;
  };
  return Superop(4, fn, "deutsch_adiabatic");
}

Superop deutsch_standard_cd(const DeutschParams& p) {
  p.validate();
  Mat m = Mat::Zero(4, 4);
  m(1, 2) = p.phi_dot();
  m(2, 1) = -p.phi_dot();
  return Superop::constant(m, "deutsch_cd");
}

SpectralPath deutsch_analytic_spectrum(const DeutschParams& p,
                                       const TimeGrid& grid) {
  p.validate();
  const Complex dl = p.delta();
  const Complex dp = p.delta_plus();
  const Complex dm = p.delta_minus();
  const double w = p.omega;
  const double pd = p.phi_dot();

  SpectralPath path;
  path.grid = grid;
  const int npts = static_cast<int>(grid.size());
  path.eigenvalues.reserve(npts);
  path.rights.reserve(npts);
  path.lefts.reserve(npts);
  path.rights_dot.reserve(npts);
  path.lefts_dot.reserve(npts);

  for (int j = 0; j < npts; ++j) {
    const double t = grid.point(j);
    const double gc = p.gc(t);
    const double gs = p.gs(t);

    Vec lam(4);
    lam << Complex(0.0), Complex(-2.0 * p.gamma0), dm, dp;

    Mat r = Mat::Zero(4, 4);
    r(0, 0) = 1.0;
    r(1, 1) = gc;
    r(2, 1) = -gs;
    r(1, 2) = -2.0 * w * gs / dp;
    r(2, 2) = -2.0 * w * gc / dp;
    r(3, 2) = 1.0;
    r(1, 3) = -2.0 * w * gs / dm;
    r(2, 3) = -2.0 * w * gc / dm;
    r(3, 3) = 1.0;

    Mat l = Mat::Zero(4, 4);
    l(0, 0) = 1.0;
    l(1, 1) = gc;
    l(1, 2) = -gs;
    l(2, 1) = w * gs / dl;
    l(2, 2) = w * gc / dl;
    l(2, 3) = dp / (2.0 * dl);
    l(3, 1) = -w * gs / dl;
    l(3, 2) = -w * gc / dl;
    l(3, 3) = -dm / (2.0 * dl);

    Mat rd = Mat::Zero(4, 4);
    rd(1, 1) = -pd * gs;
    rd(2, 1) = -pd * gc;
    rd(1, 2) = -2.0 * w * pd * gc / dp;
    rd(2, 2) = 2.0 * w * pd * gs / dp;
    rd(1, 3) = -2.0 * w * pd * gc / dm;
    rd(2, 3) = 2.0 * w * pd * gs / dm;

    Mat ld = Mat::Zero(4, 4);
    ld(1, 1) = -pd * gs;
    ld(1, 2) = -pd * gc;
    ld(2, 1) = w * pd * gc / dl;
    ld(2, 2) = -w * pd * gs / dl;
    ld(3, 1) = -w * pd * gc / dl;
    ld(3, 2) = w * pd * gs / dl;

    path.eigenvalues.push_back(std::move(lam));
    path.rights.push_back(std::move(r));
    path.lefts.push_back(std::move(l));
    path.rights_dot.push_back(std::move(rd));
    path.lefts_dot.push_back(std::move(ld));
  }
  return path;
}

Complex deutsch_theta3_companion(const DeutschParams& p, Complex theta2) {
  return (p.delta_minus() * theta2 - 4.0 * p.gamma0 * p.delta()) /
         p.delta_plus();
}

Superop deutsch_generalized(const DeutschParams& p,
                            std::function<Complex(double)> theta2) {
  p.validate();
  if (!theta2) throw ContractError("deutsch_generalized: theta2 must be set");
  const Complex dp = p.delta_plus();
  const Complex dm = p.delta_minus();
  auto fn = [p, theta2, dp, dm](double t) {
    const double gc = p.gc(t);
    const double gs = p.gs(t);
    const double pd = p.phi_dot();
    const Complex th2 = theta2(t);
    const Complex th2t = 2.0 * p.omega * (2.0 * p.gamma0 + th2) / dp;
    Mat m = Mat::Zero(4, 4);
    m(1, 1) = -2.0 * p.gamma0;
    m(1, 2) = pd;
    m(1, 3) = -th2t * gs;
    m(2, 1) = -pd;
    m(2, 2) = -2.0 * p.gamma0;
    m(2, 3) = -th2t * gc;
    m(3, 1) = th2t * gs;
    m(3, 2) = th2t * gc;
    m(3, 3) = -2.0 * p.gamma0 * (th2 - dm) / dp;
    return m;
  };
  return Superop(4, fn, "deutsch_generalized");
}

Superop deutsch_generalized_free(const DeutschParams& p,
                                 std::function<Complex(double)> theta2,
                                 std::function<Complex(double)> theta3) {
  p.validate();
  if (!theta2 || !theta3) {
    throw ContractError("deutsch_generalized_free: both phases must be set");
  }
  const Complex dl = p.delta();
  const Complex dp = p.delta_plus();
  const Complex dm = p.delta_minus();
  auto fn = [p, theta2, theta3, dl, dp, dm](double t) {
    const double gc = p.gc(t);
    const double gs = p.gs(t);
    const double pd = p.phi_dot();
    const Complex th2 = theta2(t);
    const Complex th3 = theta3(t);
    const Complex chi_p = (dp * th3 - dm * th2) / (2.0 * dl);
    const Complex chi_m = (-dm * th3 + dp * th2) / (2.0 * dl);
    const Complex eta1 = -2.0 * p.gamma0 * gc * gc + gs * gs * chi_p;
    const Complex eta2 = -2.0 * p.gamma0 * gs * gs + gc * gc * chi_p;
    const Complex chi_t =
        std::sin(p.winding() * kPi * t) * (2.0 * p.gamma0 + chi_p);
    const Complex d32 = th3 - th2;
    Mat m = Mat::Zero(4, 4);
    m(1, 1) = eta1;
    m(1, 2) = chi_t / 2.0 + pd;
    m(1, 3) = p.omega * d32 * gs / dl;
    m(2, 1) = chi_t / 2.0 - pd;
    m(2, 2) = eta2;
    m(2, 3) = p.omega * d32 * gc / dl;
    m(3, 1) = -p.omega * d32 * gs / dl;
    m(3, 2) = -p.omega * d32 * gc / dl;
    m(3, 3) = chi_m;
    return m;
  };
  return Superop(4, fn, "deutsch_generalized_free");
}

DeutschVariants deutsch_variants(const DeutschParams& p) {
  p.validate();
  const Superop base = deutsch_lindbladian(p);
  Mat cd = Mat::Zero(4, 4);
  cd(1, 2) = p.phi_dot();
  cd(2, 1) = -p.phi_dot();
  Superop standard = Superop(
      4, [base, cd](double t) { return Mat(base.at(t) + cd); },
      "deutsch_standard_tqd");

  Mat ti = Mat::Zero(4, 4);
  ti(1, 1) = ti(2, 2) = ti(3, 3) = -2.0 * p.gamma0;
  ti(1, 2) = p.phi_dot();
  ti(2, 1) = -p.phi_dot();
  DeutschVariants v{base,
                    std::move(standard),
                    Superop::constant(ti, "deutsch_generalized_ti"),
                    {},
                    {},
                    Vec(4),
                    {},
                    Vec(4)};

  v.standard_tqd_spec.hamiltonian = [p](double t) {
    return Mat(deutsch_hamiltonian(p, t) + deutsch_cd_hamiltonian(p));
  };
  v.standard_tqd_spec.channels.push_back(
      {sigma_z(), [g = p.gamma0](double) { return g; }});

  v.generalized_ti_spec.hamiltonian = [p](double) {
    return deutsch_cd_hamiltonian(p);
  };
  for (const Mat& jump : {sigma_x(), sigma_y(), sigma_z()}) {
    v.generalized_ti_spec.channels.push_back(
        {jump, [g = p.gamma0](double) { return g / 2.0; }});
  }

  v.initial_state << 1.0, 1.0, 0.0, 0.0;
  v.adiabatic_solution = [p](double t) {
    const double decay = std::exp(-2.0 * p.gamma0 * t);
    Vec x(4);
    x << 1.0, decay * p.gc(t), -decay * p.gs(t), 0.0;
    return x;
  };
  v.target_state = v.adiabatic_solution(p.tau);
  return v;
}

// --- Avoided-crossing sweep model ------------------------------------------

void LZParams::validate() const {
  if (!(omega0 > 0.0)) throw ContractError("LZParams: omega0 must be > 0");
  if (!(tau > 0.0)) throw ContractError("LZParams: tau must be > 0");
  if (!(gamma0 >= 0.0)) throw ContractError("LZParams: gamma0 must be >= 0");
  if (!(theta0 >= 0.0 && theta0 < kPi / 2.0)) {
    throw ContractError("LZParams: theta0 must lie in [0, pi/2)");
  }
  if (static_cast<bool>(theta_fn) != static_cast<bool>(theta_dot_fn)) {
    throw ContractError(
        "LZParams: custom schedules need both theta_fn and theta_dot_fn");
  }
  if (has_custom_schedule() && std::abs(theta_fn(0.0)) > 1e-9) {
    throw ContractError("LZParams: custom schedule must start at theta(0) = 0");
  }
  const int probes = 2000;
  for (int j = 0; j <= probes; ++j) {
    const double t = tau * static_cast<double>(j) / probes;
    const double th = theta(t);
    if (!(th >= -1e-12 && th < kPi / 2.0)) {
      std::ostringstream msg;
      msg << "LZParams: theta(" << t << ") = " << th
          << " leaves the allowed range [0, pi/2)";
      throw ContractError(msg.str());
    }
    const double margin = std::abs(gamma(t) * std::cos(th) - omega0) / omega0;
    if (margin <= kEpRelMargin) {
      std::ostringstream msg;
      msg << "LZParams: gamma(t)*cos(theta(t)) at t = " << t
          << " is within relative margin " << kEpRelMargin << " of omega0 = "
          << omega0 << "; the eigenvector basis is (near-)defective there";
      throw ExceptionalPointError(msg.str());
    }
  }
}

double LZParams::theta(double t) const {
  return has_custom_schedule() ? theta_fn(t) : theta0 * t / tau;
}

double LZParams::theta_dot(double t) const {
  return has_custom_schedule() ? theta_dot_fn(t) : theta0 / tau;
}

double LZParams::gamma(double t) const {
  return gamma_mode == GammaMode::constant ? gamma0
                                           : gamma0 / std::cos(theta(t));
}

double LZParams::gamma_dot(double t) const {
  if (gamma_mode == GammaMode::constant) return 0.0;
  const double th = theta(t);
  return gamma0 * std::tan(th) * theta_dot(t) / std::cos(th);
}

double LZParams::gamma_integral(double t) const {
  if (gamma_mode == GammaMode::constant) return gamma0 * t;
  if (!has_custom_schedule()) {
    if (theta0 < 1e-12) return gamma0 * t;
    const double th = theta(t);
    return gamma0 * (tau / theta0) * std::log((1.0 + std::sin(th)) / std::cos(th));
  }
  // Composite Simpson on [0, t] for custom schedules.
  const int n = 2048;  // even
  const double h = t / n;
  double acc = gamma(0.0) + gamma(t);
  for (int j = 1; j < n; ++j) {
    acc += (j % 2 == 1 ? 4.0 : 2.0) * gamma(j * h);
  }
  return acc * h / 3.0;
}

double lz_sec_average(double theta0) {
  if (!(theta0 >= 0.0 && theta0 < kPi / 2.0)) {
    throw ContractError("lz_sec_average: theta0 must lie in [0, pi/2)");
  }
  if (theta0 < 1e-12) return 1.0;
  return std::log((1.0 + std::sin(theta0)) / std::cos(theta0)) / theta0;
}

double lz_tan_average(double theta0) {
  if (!(theta0 >= 0.0 && theta0 < kPi / 2.0)) {
    throw ContractError("lz_tan_average: theta0 must lie in [0, pi/2)");
  }
  if (theta0 < 1e-12) return 0.0;
  return -std::log(std::cos(theta0)) / theta0;
}

Mat lz_hamiltonian(const LZParams& p, double t) {
  const double detuning = p.omega0 * std::tan(p.theta(t));
  return (p.omega0 / 2.0) * sigma_z() + (detuning / 2.0) * sigma_x();
}

Mat lz_cd_hamiltonian(const LZParams& p, double t) {
  return (p.theta_dot(t) / 2.0) * sigma_y();
}

LindbladSpec lz_spec(const LZParams& p) {
  p.validate();
  LindbladSpec spec;
  spec.hamiltonian = [p](double t) { return lz_hamiltonian(p, t); };
  spec.channels.push_back({sigma_y(), [p](double t) { return p.gamma(t); }});
  return spec;
}

Superop lz_lindbladian(const LZParams& p) {
  p.validate();
  auto fn = [p](double t) {
    const double g = p.gamma(t);
    const double tn = std::tan(p.theta(t));
    Mat m = Mat::Zero(4, 4);
    m(1, 1) = -2.0 * g;
    m(1, 2) = -p.omega0;
    m(2, 1) = p.omega0;
    m(2, 3) = -p.omega0 * tn;
    m(3, 2) = p.omega0 * tn;
    m(3, 3) = -2.0 * g;
    return m;
  };
  return Superop(4, fn, "lz_adiabatic");
}

namespace {

// varpi = gamma*theta_dot*tan(theta) - gamma_dot; identically zero in
// sec_theta mode (exact cancellation enforced rather than recomputed).
double lz_varpi(const LZParams& p, double t) {
  if (p.gamma_mode == GammaMode::sec_theta) return 0.0;
  return p.gamma(t) * p.theta_dot(t) * std::tan(p.theta(t)) - p.gamma_dot(t);
}

}  // namespace

Superop lz_standard_cd(const LZParams& p) {
  p.validate();
  auto fn = [p](double t) {
    const double th = p.theta(t);
    const double td = p.theta_dot(t);
    const double c = std::cos(th);
    const double u = p.gamma(t) * c;
    const double kappa_sq = u * u - p.omega0 * p.omega0;
    const double varpi = lz_varpi(p, t);
    const double wt = p.omega0 * varpi * c * c;
    Mat m = Mat::Zero(4, 4);
    m(1, 3) = td;
    m(3, 1) = -td;
    m(1, 2) = -wt / (2.0 * kappa_sq);
    m(2, 1) = -wt / (2.0 * kappa_sq);
    m(2, 3) = wt * std::tan(th) / (2.0 * kappa_sq);
    m(3, 2) = wt * std::tan(th) / (2.0 * kappa_sq);
    return m;
  };
  return Superop(4, fn, "lz_cd");
}

SpectralPath lz_analytic_spectrum(const LZParams& p, const TimeGrid& grid) {
  p.validate();
  const double w0 = p.omega0;

  SpectralPath path;
  path.grid = grid;
  const int npts = static_cast<int>(grid.size());
  path.eigenvalues.reserve(npts);
  path.rights.reserve(npts);
  path.lefts.reserve(npts);
  path.rights_dot.reserve(npts);
  path.lefts_dot.reserve(npts);

  for (int j = 0; j < npts; ++j) {
    const double t = grid.point(j);
    const double th = p.theta(t);
    const double td = p.theta_dot(t);
    const double s = std::sin(th);
    const double c = std::cos(th);
    const double g = p.gamma(t);
    const double u = g * c;
    const Complex kappa = std::sqrt(Complex(u * u - w0 * w0, 0.0));
    const Complex ktp = 1.0 + u / kappa;
    const Complex ktm = 1.0 - u / kappa;
    const double varpi = lz_varpi(p, t);
    const double udot = -c * varpi;
    const Complex kdot = u * udot / kappa;
    const Complex dktp = c * varpi * w0 * w0 / (kappa * kappa * kappa);
    const Complex dktm = -dktp;

    Vec lam(4);
    lam << Complex(0.0), Complex(-2.0 * g), -g - kappa / c, -g + kappa / c;

    Mat r = Mat::Zero(4, 4);
    r(0, 0) = 1.0;
    r(1, 1) = s;
    r(3, 1) = c;
    r(1, 2) = -c;
    r(2, 2) = (u - kappa) / w0;
    r(3, 2) = s;
    r(1, 3) = -c;
    r(2, 3) = (u + kappa) / w0;
    r(3, 3) = s;

    Mat l = Mat::Zero(4, 4);
    l(0, 0) = 1.0;
    l(1, 1) = s;
    l(1, 3) = c;
    l(2, 1) = -c * ktp / 2.0;
    l(2, 2) = -w0 / (2.0 * kappa);
    l(2, 3) = s * ktp / 2.0;
    l(3, 1) = -c * ktm / 2.0;
    l(3, 2) = w0 / (2.0 * kappa);
    l(3, 3) = s * ktm / 2.0;

    Mat rd = Mat::Zero(4, 4);
    rd(1, 1) = td * c;
    rd(3, 1) = -td * s;
    rd(1, 2) = td * s;
    rd(2, 2) = (udot - kdot) / w0;
    rd(3, 2) = td * c;
    rd(1, 3) = td * s;
    rd(2, 3) = (udot + kdot) / w0;
    rd(3, 3) = td * c;

    Mat ld = Mat::Zero(4, 4);
    ld(1, 1) = td * c;
    ld(1, 3) = -td * s;
    ld(2, 1) = (td * s * ktp - c * dktp) / 2.0;
    ld(2, 2) = w0 * kdot / (2.0 * kappa * kappa);
    ld(2, 3) = (td * c * ktp + s * dktp) / 2.0;
    ld(3, 1) = (td * s * ktm - c * dktm) / 2.0;
    ld(3, 2) = -w0 * kdot / (2.0 * kappa * kappa);
    ld(3, 3) = (td * c * ktm + s * dktm) / 2.0;

    path.eigenvalues.push_back(std::move(lam));
    path.rights.push_back(std::move(r));
    path.lefts.push_back(std::move(l));
    path.rights_dot.push_back(std::move(rd));
    path.lefts_dot.push_back(std::move(ld));
  }
  return path;
}

Vec lz_transport_corrections(const LZParams& p, double t) {
  Vec g = Vec::Zero(4);
  if (p.gamma_mode == GammaMode::sec_theta) return g;
  const double th = p.theta(t);
  const double c = std::cos(th);
  const double u = p.gamma(t) * c;
  const Complex kappa =
      std::sqrt(Complex(u * u - p.omega0 * p.omega0, 0.0));
  const double varpi = lz_varpi(p, t);
  g(2) = varpi * (kappa - u) * c / (2.0 * kappa * kappa);
  g(3) = -varpi * (kappa + u) * c / (2.0 * kappa * kappa);
  return g;
}

Superop lz_generalized(const LZParams& p) {
  p.validate();
  if (p.gamma_mode != GammaMode::sec_theta) {
    throw ContractError(
        "lz_generalized: gamma_mode mismatch; the isotropic-damping "
        "shortcut requires gamma_mode = sec_theta");
  }
  auto fn = [p](double t) {
    const double gbar = p.gamma0 / std::cos(p.theta(t));
    const double td = p.theta_dot(t);
    Mat m = Mat::Zero(4, 4);
    m(1, 1) = m(2, 2) = m(3, 3) = -2.0 * gbar;
    m(1, 3) = td;
    m(3, 1) = -td;
    return m;
  };
  return Superop(4, fn, "lz_generalized");
}

LZVariants lz_variants(const LZParams& p) {
  p.validate();
  if (p.gamma_mode != GammaMode::sec_theta) {
    throw ContractError(
        "lz_variants: gamma_mode mismatch; the shortcut family requires "
        "gamma_mode = sec_theta (vanishing transport corrections)");
  }
  const Superop base = lz_lindbladian(p);
  const Superop cd = lz_standard_cd(p);
  Superop standard = Superop(
      4, [base, cd](double t) { return Mat(base.at(t) + cd.at(t)); },
      "lz_standard_tqd");

  LZVariants v{base,
               std::move(standard),
               lz_generalized(p),
               {},
               {},
               Vec(4),
               {},
               Vec(4)};

  v.standard_tqd_spec.hamiltonian = [p](double t) {
    return Mat(lz_hamiltonian(p, t) + lz_cd_hamiltonian(p, t));
  };
  v.standard_tqd_spec.channels.push_back(
      {sigma_y(), [p](double t) { return p.gamma(t); }});

  v.generalized_spec.hamiltonian = [p](double t) {
    return lz_cd_hamiltonian(p, t);
  };
  for (const Mat& jump : {sigma_x(), sigma_y(), sigma_z()}) {
    v.generalized_spec.channels.push_back(
        {jump, [p](double t) { return p.gamma(t) / 2.0; }});
  }

  v.initial_state << 1.0, 0.0, 0.0, -1.0;
  v.adiabatic_solution = [p](double t) {
    const double decay = std::exp(-2.0 * p.gamma_integral(t));
    const double th = p.theta(t);
    Vec x(4);
    x << 1.0, -decay * std::sin(th), 0.0, -decay * std::cos(th);
    return x;
  };
  v.target_state = v.adiabatic_solution(p.tau);
  return v;
}

}  // namespace ltqd
