#include "ltqd/basis.hpp"

#include <cmath>
#include <utility>

#include "ltqd/errors.hpp"

namespace ltqd {

OperatorBasis::OperatorBasis(int dim, std::vector<Mat> elements, std::string name)
    : dim_(dim), elements_(std::move(elements)), name_(std::move(name)) {}

OperatorBasis OperatorBasis::pauli() {
  const Complex i(0.0, 1.0);
  std::vector<Mat> e(4, Mat::Zero(2, 2));
  e[0] = Mat::Identity(2, 2);
  e[1] << 0, 1, 1, 0;
  e[2] << 0, -i, i, 0;
  e[3] << 1, 0, 0, -1;
  return OperatorBasis(2, std::move(e), "pauli");
}

OperatorBasis OperatorBasis::gell_mann(int dim) {
  if (dim < 2) throw DimensionError("gell_mann: dim must be >= 2");
  const int d = dim;
  const double scale = std::sqrt(d / 2.0);  // lifts Tr{s s^dag} from 2 to D
  const Complex i(0.0, 1.0);
  std::vector<Mat> e;
  e.reserve(d * d);
  e.push_back(Mat::Identity(d, d));
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Mat m = Mat::Zero(d, d);
      m(j, k) = 1.0;
      m(k, j) = 1.0;
      e.push_back(scale * m);
    }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Mat m = Mat::Zero(d, d);
      m(j, k) = -i;
      m(k, j) = i;
      e.push_back(scale * m);
    }
  for (int l = 1; l < d; ++l) {
    Mat m = Mat::Zero(d, d);
    for (int q = 0; q < l; ++q) m(q, q) = 1.0;
    m(l, l) = -static_cast<double>(l);
    e.push_back(scale * std::sqrt(2.0 / (l * (l + 1.0))) * m);
  }
  return OperatorBasis(d, std::move(e), "gell_mann_" + std::to_string(d));
}

void OperatorBasis::validate(double tol) const {
  const int n = size();
  const double d = static_cast<double>(dim_);
  if (n != dim_ * dim_) throw ContractError("basis: element count must be D^2");
  if (!elements_[0].isApprox(Mat::Identity(dim_, dim_), tol))
    throw ContractError("basis: element 0 must be the identity");
  for (int a = 1; a < n; ++a)
    if (std::abs(elements_[a].trace()) > tol * d)
      throw ContractError("basis: element " + std::to_string(a) + " is not traceless");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Complex g = (elements_[a] * elements_[b].adjoint()).trace();
      const Complex want = (a == b) ? Complex(d, 0.0) : Complex(0.0, 0.0);
      if (std::abs(g - want) > tol * d)
        throw ContractError("basis: orthogonality violated at (" + std::to_string(a) +
                            "," + std::to_string(b) + ")");
    }
}

}  // namespace ltqd
