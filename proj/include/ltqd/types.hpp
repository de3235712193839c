#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace ltqd {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Uniform time grid: n_steps intervals, n_steps + 1 sample points.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int n_steps = 1;

  double dt() const { return (t1 - t0) / n_steps; }
  int size() const { return n_steps + 1; }

  // Endpoints are reproduced exactly; interior points are evenly spaced.
  double point(int j) const {
    if (j <= 0) return t0;
    if (j >= n_steps) return t1;
    return t0 + (t1 - t0) * (static_cast<double>(j) / n_steps);
  }

  std::vector<double> points() const {
    std::vector<double> ts(size());
    for (int j = 0; j < size(); ++j) ts[j] = point(j);
    return ts;
  }
};

}  // namespace ltqd
