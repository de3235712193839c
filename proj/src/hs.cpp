#include "ltqd/hs.hpp"

#include <cmath>
#include <string>

#include "ltqd/errors.hpp"

namespace ltqd {

namespace {

void check_dim(const Mat& m, const OperatorBasis& basis, const char* who) {
  if (m.rows() != basis.dim() || m.cols() != basis.dim())
    throw DimensionError(std::string(who) + ": operator shape does not match basis");
}

}  // namespace

Vec vectorize(const Mat& rho, const OperatorBasis& basis) {
  check_dim(rho, basis, "vectorize");
  Vec x(basis.size());
  for (int n = 0; n < basis.size(); ++n)
    x(n) = (rho * basis.element(n).adjoint()).trace();
  return x;
}

Mat matrix_from_components(const Vec& x, const OperatorBasis& basis) {
  if (x.size() != basis.size())
    throw DimensionError("matrix_from_components: component count must be D^2");
  Mat m = Mat::Zero(basis.dim(), basis.dim());
  for (int n = 0; n < basis.size(); ++n) m += x(n) * basis.element(n);
  return m / static_cast<double>(basis.dim());
}

Mat devectorize(const Vec& x, const OperatorBasis& basis, double trace_tol) {
  if (x.size() != basis.size())
    throw DimensionError("devectorize: component count must be D^2");
  if (std::abs(x(0) - Complex(1.0, 0.0)) > trace_tol)
    throw InvalidStateError("devectorize: trace component deviates from 1 by " +
                            std::to_string(std::abs(x(0) - Complex(1.0, 0.0))) +
                            " (integrator drift?)");
  Mat m = matrix_from_components(x, basis);
  return 0.5 * (m + m.adjoint().eval());
}

Complex hs_inner(const Vec& a, const Vec& b, const OperatorBasis& basis) {
  if (a.size() != basis.size() || b.size() != basis.size())
    throw DimensionError("hs_inner: component count must be D^2");
  const double d = static_cast<double>(basis.dim());
  return a.dot(b) / (d * d);  // Eigen dot conjugates the first argument
}

Complex hs_inner_matrices(const Mat& x, const Mat& y, const OperatorBasis& basis) {
  check_dim(x, basis, "hs_inner_matrices");
  check_dim(y, basis, "hs_inner_matrices");
  return (x.adjoint() * y).trace() / static_cast<double>(basis.dim());
}

Complex pair_lr(const Vec& left, const Vec& right) {
  if (left.size() != right.size())
    throw DimensionError("pair_lr: vector lengths differ");
  return left.transpose() * right;
}

Mat apply_generator(const LindbladSpec& spec, const Mat& x, double t) {
  if (!spec.hamiltonian) throw ContractError("apply_generator: missing hamiltonian");
  const Mat h = spec.hamiltonian(t);
  if (h.rows() != h.cols() || h.rows() != x.rows())
    throw DimensionError("apply_generator: hamiltonian shape mismatch");
  if ((h - h.adjoint().eval()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw ContractError("apply_generator: hamiltonian not Hermitian at t=" + std::to_string(t));
  const Complex i(0.0, 1.0);
  Mat out = -i * (h * x - x * h);
  for (const auto& ch : spec.channels) {
    if (ch.jump.rows() != x.rows() || ch.jump.cols() != x.cols())
      throw DimensionError("apply_generator: jump operator shape mismatch");
    const double g = ch.rate ? ch.rate(t) : 0.0;
    if (g < 0.0)
      throw ContractError("apply_generator: negative rate at t=" + std::to_string(t));
    if (g == 0.0) continue;
    const Mat ldl = ch.jump.adjoint() * ch.jump;
    out += g * (ch.jump * x * ch.jump.adjoint() - 0.5 * (ldl * x + x * ldl));
  }
  return out;
}

Superop build_superop(const LindbladSpec& spec, const OperatorBasis& basis,
                      std::string label) {
  const int n = basis.size();
  const double d = static_cast<double>(basis.dim());
  // capture by value so the superoperator stays valid on its own
  auto fn = [spec, basis, n, d](double t) -> Mat {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      const Mat lx = apply_generator(spec, basis.element(i), t);
      for (int k = 0; k < n; ++k)
        m(k, i) = (basis.element(k).adjoint() * lx).trace() / d;
    }
    return m;
  };
  return Superop(n, std::move(fn), std::move(label));
}

}  // namespace ltqd
