#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ltqd/types.hpp"

namespace ltqd {

// Time-dependent superoperator in coherence-vector form: a deterministic map
// t -> D^2 x D^2 complex matrix. Evaluation is pure; two calls at equal t
// return identical matrices.
class Superop {
 public:
  Superop(int dim_sq, std::function<Mat(double)> fn, std::string label = {});

  // Constant-in-time superoperator.
  static Superop constant(const Mat& m, std::string label = {});

  // Piecewise-linear interpolation through per-grid-point samples, constant
  // beyond the grid ends.
  static Superop from_grid(const TimeGrid& grid, std::vector<Mat> samples,
                           std::string label = {});

  Mat at(double t) const;
  int dim_sq() const { return dim_sq_; }
  const std::string& label() const { return label_; }

 private:
  int dim_sq_;
  std::function<Mat(double)> fn_;
  std::string label_;
};

}  // namespace ltqd
