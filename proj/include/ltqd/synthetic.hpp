#pragma once

#include "ltqd/spectral.hpp"
#include "ltqd/superop.hpp"
#include "ltqd/types.hpp"

namespace ltqd {

// Synthetic non-diagonalizable test generator with an exactly known
// quasi-eigenvector structure: L(t) = S(t) * T * S(t)^{-1} where
//   T = [[l1, 1], [0, l1]] (+) l3 (+) l4   (one rank-2 chain, two rank-1)
// and S(t) = 1 + 0.3*sin(t)*A + 0.2*cos(0.7*t)*B with fixed mixing matrices
// A, B chosen so S stays well conditioned for all t.  Because L is built
// FROM its block decomposition, the harness is its own oracle: the chain
// vectors are the columns of S, the left chain rows of S^{-1}, and the
// derivatives follow from Sdot analytically (d/dt S^{-1} = -S^{-1} Sdot
// S^{-1}).
struct SyntheticHarness {
  TimeGrid grid;
  Superop op;                // L(t)
  JordanStructure structure; // exact chains with analytic derivatives
  Complex l1, l3, l4;        // block eigenvalues
  Mat t_matrix;              // T (constant)
};

SyntheticHarness make_synthetic_harness(const TimeGrid& grid);

// Exact S(t) and its derivative (exposed for tests that want the raw frames).
Mat synthetic_frame(double t);
Mat synthetic_frame_dot(double t);

// Deliberately corrupted copies, used to prove the diagnostics detect damage:
// rank order of the 2-chain swapped (chain contract residual becomes O(1)) …
JordanStructure corrupt_rank_order(const JordanStructure& js);
// … and left rows of the first block rescaled (biorthonormality broken).
JordanStructure corrupt_lefts(const JordanStructure& js);

}  // namespace ltqd
