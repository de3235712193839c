#pragma once

#include <functional>
#include <vector>

#include "ltqd/basis.hpp"
#include "ltqd/superop.hpp"
#include "ltqd/types.hpp"

namespace ltqd {

// Coherence-vector components of an operator: x_n = Tr{X sigma_n^dag}.
// For a density matrix the first component is 1.
Vec vectorize(const Mat& rho, const OperatorBasis& basis);

// Raw expansion X = (1/D) sum_n x_n sigma_n, no state checks.
Mat matrix_from_components(const Vec& x, const OperatorBasis& basis);

// Reconstructs a Hermitian density matrix from components. Errors when the
// trace component deviates from 1 by more than trace_tol (integrator drift).
Mat devectorize(const Vec& x, const OperatorBasis& basis, double trace_tol = 1e-8);

// Hilbert-Schmidt inner product (1/D) Tr{X^dag Y} between the operators the
// component vectors represent; equal to (1/D^2) sum_n conj(a_n) b_n.
Complex hs_inner(const Vec& a, const Vec& b, const OperatorBasis& basis);

// Same product evaluated on matrix realizations (cross-check route).
Complex hs_inner_matrices(const Mat& x, const Mat& y, const OperatorBasis& basis);

// Biorthonormal pairing <<left|right>>: plain unconjugated dot product. This
// is the contraction all left/right eigenvector contracts are written in;
// lefts obtained by matrix inversion satisfy pair(E_a, D_b) = delta_ab
// exactly by construction.
Complex pair_lr(const Vec& left, const Vec& right);

// One decay channel: jump operator with a time-dependent nonnegative rate.
struct LindbladChannel {
  Mat jump;
  std::function<double(double)> rate;
};

// Generator specification: H(t) plus channels. hbar = 1 throughout.
struct LindbladSpec {
  std::function<Mat(double)> hamiltonian;
  std::vector<LindbladChannel> channels;
};

// Direct action of the generator on an operator at time t:
//   -i[H, X] + sum_k gamma_k (L X L^dag - (1/2){L^dag L, X}).
// Validates H hermiticity and rate nonnegativity at evaluation time.
Mat apply_generator(const LindbladSpec& spec, const Mat& x, double t);

// Superoperator matrix with elements (1/D) Tr{sigma_k^dag L[sigma_i]}.
// Row 0 is identically zero (trace preservation).
Superop build_superop(const LindbladSpec& spec, const OperatorBasis& basis,
                      std::string label = {});

}  // namespace ltqd
