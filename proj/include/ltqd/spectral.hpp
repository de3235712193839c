#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltqd/superop.hpp"
#include "ltqd/types.hpp"

namespace ltqd {

struct EigenOptions {
  double cond_limit = 1e10;     // eigenvector-matrix condition number refusal
  double cluster_tol = 1e-8;    // relative eigenvalue spread treated as degenerate
  double ambiguity_tol = 1e-12; // branch-assignment tie width that is an error
};

// Eigen-decomposition along a time grid. Right eigenvectors are columns of
// rights[j]; left eigenvectors are rows of lefts[j] = rights[j]^{-1}, so the
// biorthonormal pairing <<E_b|D_a>> = delta_ba holds exactly by construction
// and sum_a |D_a>><<E_a| = 1 (completeness).
struct SpectralPath {
  TimeGrid grid;
  std::vector<Vec> eigenvalues;  // per point, N entries
  std::vector<Mat> rights;       // per point, N x N (columns)
  std::vector<Mat> lefts;        // per point, N x N (rows)
  std::vector<Mat> rights_dot;   // filled by differentiate_path
  std::vector<Mat> lefts_dot;
  std::optional<std::string> derivative_warning;

  int n_branches() const { return rights.empty() ? 0 : static_cast<int>(rights.front().cols()); }
  bool has_derivatives() const { return !rights_dot.empty(); }

  // Gauge-invariant projector |D_a>><<E_a| at grid point j.
  Mat projector(int j, int alpha) const;

  // Largest |<<E_b|D_a>> - delta| over the path (should be ~machine epsilon).
  double biorthonormality_residual() const;
  // Largest |sum_a |D_a>><<E_a| - 1| over the path.
  double completeness_residual() const;
  // Largest eigenvalue jump between adjacent points.
  double max_eigenvalue_jump() const;
};

// Pointwise solve + gauge smoothing. Throws ExceptionalPointError when the
// eigenvector matrix condition number exceeds opt.cond_limit (defective or
// near-defective generator), naming the offending time.
SpectralPath eigensystem_path(const Superop& op, const TimeGrid& grid,
                              const EigenOptions& opt = {});

// Branch matching and gauge continuity:
//  - t0: branches ordered by (|lambda| asc, Re desc, Im asc); each vector is
//    phase-rotated so its largest-magnitude component is real positive;
//  - later points: branches matched to slope-extrapolated eigenvalues by
//    minimal-distance assignment (GaugeAmbiguityError on ties between
//    distinct non-degenerate branches);
//  - each vector rescaled by the complex least-squares factor onto its
//    predecessor; degenerate clusters realigned by a least-squares basis
//    change within the cluster subspace;
//  - lefts re-derived by inversion at every point.
void gauge_smooth(SpectralPath& path, const EigenOptions& opt = {});

// Central differences in the interior, second-order one-sided at the ends.
// Left derivatives use d/dt(R^{-1}) = -R^{-1} Rdot R^{-1}, which enforces
// <<Edot_b|D_a>> + <<E_b|Ddot_a>> = 0 exactly. Attaches a warning when a
// step-doubled derivative estimate disagrees beyond 1e-5 relative.
void differentiate_path(SpectralPath& path);

// Overlap matrix G[b][a] = <<E_b | Ddot_a>> at grid point j.
Mat overlap_matrix(const SpectralPath& path, int j);

// One Jordan block along the grid: eigenvalue path plus quasi-eigenvector
// paths ordered by rank (columns of rights / rows of lefts, rank 1 first).
// Conventions: L|D^n>> = |D^{n-1}>> + lambda |D^n>> with |D^0>> = 0, and
// <<E^n|L = <<E^{n+1}| + lambda <<E^n| with <<E^{rank+1}| = 0.
struct JordanBlock {
  std::vector<Complex> eigenvalue;  // per grid point
  std::vector<Mat> rights;          // per point, N x k
  std::vector<Mat> lefts;           // per point, k x N
  std::vector<Mat> rights_dot;
  std::vector<Mat> lefts_dot;

  int rank() const { return rights.empty() ? 0 : static_cast<int>(rights.front().cols()); }
};

// User-supplied Jordan structure (never inferred numerically). Flattened
// matrices are block-major, rank-minor.
struct JordanStructure {
  TimeGrid grid;
  std::vector<JordanBlock> blocks;

  int total_rank() const;
  int dim() const;  // ambient N (= D^2 when the structure is complete)
  bool has_derivatives() const;

  Mat rights_at(int j) const;
  Mat lefts_at(int j) const;
  Mat rights_dot_at(int j) const;
  Mat lefts_dot_at(int j) const;

  // Recast a diagonalizable path as all-1x1 blocks.
  static JordanStructure from_path(const SpectralPath& path);

  // Largest biorthonormality defect across the grid.
  double biorthonormality_residual() const;
};

struct QuasiEigenReport {
  double right_residual = 0.0;  // max ||L D^n - D^{n-1} - lambda D^n||
  double left_residual = 0.0;   // max ||E^n L - E^{n+1} - lambda E^n||
};

// Verifies the chain relations of a supplied structure against the generator
// at grid point j.
QuasiEigenReport check_quasi_eigen(const Superop& op, const JordanStructure& js, int j);

}  // namespace ltqd
