#include "ltqd/superop.hpp"

#include <cmath>

#include "ltqd/errors.hpp"

namespace ltqd {

Superop::Superop(int dim_sq, std::function<Mat(double)> fn, std::string label)
    : dim_sq_(dim_sq), fn_(std::move(fn)), label_(std::move(label)) {
  if (dim_sq_ < 1) throw DimensionError("Superop: dim_sq must be positive");
  if (!fn_) throw ContractError("Superop: missing evaluation function");
}

Superop Superop::constant(const Mat& m, std::string label) {
  if (m.rows() != m.cols()) throw DimensionError("Superop::constant: matrix must be square");
  const Mat copy = m;
  return Superop(static_cast<int>(m.rows()), [copy](double) { return copy; },
                 std::move(label));
}

Superop Superop::from_grid(const TimeGrid& grid, std::vector<Mat> samples,
                           std::string label) {
  if (static_cast<int>(samples.size()) != grid.size())
    throw DimensionError("Superop::from_grid: one sample per grid point required");
  const int n = static_cast<int>(samples.front().rows());
  for (const Mat& s : samples)
    if (s.rows() != n || s.cols() != n)
      throw DimensionError("Superop::from_grid: inconsistent sample shapes");
  auto fn = [grid, samples = std::move(samples)](double t) -> Mat {
    if (t <= grid.t0) return samples.front();
    if (t >= grid.t1) return samples.back();
    const double x = (t - grid.t0) / grid.dt();
    const int j = std::min(static_cast<int>(std::floor(x)), grid.n_steps - 1);
    const double w = x - j;
    return (1.0 - w) * samples[j] + w * samples[j + 1];
  };
  return Superop(n, std::move(fn), std::move(label));
}

Mat Superop::at(double t) const {
  Mat m = fn_(t);
  if (m.rows() != dim_sq_ || m.cols() != dim_sq_)
    throw DimensionError("Superop: evaluation returned wrong shape");
  return m;
}

}  // namespace ltqd
