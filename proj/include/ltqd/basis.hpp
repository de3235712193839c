#pragma once

#include <string>
#include <vector>

#include "ltqd/types.hpp"

namespace ltqd {

// Orthogonal Hermitian operator basis {sigma_0 = 1, sigma_1, ...} with
// Tr{sigma_n sigma_m^dag} = D delta_nm. Element 0 is the identity; all
// others are traceless.
class OperatorBasis {
 public:
  // Qubit basis {1, sx, sy, sz}.
  static OperatorBasis pauli();

  // Generalized Gell-Mann basis for dimension D >= 2, rescaled to the
  // normalization above. Order: identity, symmetric pairs (j<k, lexicographic),
  // antisymmetric pairs (same order), then the D-1 diagonal elements.
  // gell_mann(2) coincides with pauli().
  static OperatorBasis gell_mann(int dim);

  int dim() const { return dim_; }                 // Hilbert-space dimension D
  int size() const { return static_cast<int>(elements_.size()); }  // D^2
  const Mat& element(int n) const { return elements_[n]; }
  const std::vector<Mat>& elements() const { return elements_; }
  const std::string& name() const { return name_; }

  // Checks the defining relations; throws ContractError on violation.
  void validate(double tol = 1e-12) const;

 private:
  OperatorBasis(int dim, std::vector<Mat> elements, std::string name);

  int dim_;
  std::vector<Mat> elements_;
  std::string name_;
};

}  // namespace ltqd
