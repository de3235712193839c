#include "ltqd/synthetic.hpp"

#include <cmath>
#include <utility>

#include "ltqd/errors.hpp"

namespace ltqd {

namespace {

Mat mix_a() {
  Mat a = Mat::Zero(4, 4);
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;
  a(2, 3) = 1.0;
  a(3, 0) = 1.0;
  return a;
}

Mat mix_b() {
  Mat b(4, 4);
  b << 0.5, 0.0, -0.3, 0.0,
       0.0, -0.4, 0.0, 0.2,
       0.3, 0.0, 0.4, 0.0,
       0.0, -0.2, 0.0, -0.5;
  return b;
}

constexpr Complex kL1{-0.4, 0.9};
constexpr Complex kL3{-0.1, 0.0};
constexpr Complex kL4{-0.8, -0.3};

Mat block_t() {
  Mat t = Mat::Zero(4, 4);
  t(0, 0) = kL1;
  t(0, 1) = 1.0;
  t(1, 1) = kL1;
  t(2, 2) = kL3;
  t(3, 3) = kL4;
  return t;
}

}  // namespace

Mat synthetic_frame(double t) {
  return Mat(Mat::Identity(4, 4) + 0.3 * std::sin(t) * mix_a() +
             0.2 * std::cos(0.7 * t) * mix_b());
}

Mat synthetic_frame_dot(double t) {
  return Mat(0.3 * std::cos(t) * mix_a() -
             0.14 * std::sin(0.7 * t) * mix_b());
}

SyntheticHarness make_synthetic_harness(const TimeGrid& grid) {
  const Mat t_mat = block_t();
  Superop op(
      4,
      [t_mat](double t) {
        const Mat s = synthetic_frame(t);
        return Mat(s * t_mat * s.inverse());
      },
      "synthetic_two_block");

  JordanStructure js;
  js.grid = grid;
  js.blocks.resize(3);
  const int npts = static_cast<int>(grid.size());
  for (int j = 0; j < npts; ++j) {
    const double t = grid.point(j);
    const Mat s = synthetic_frame(t);
    const Mat sd = synthetic_frame_dot(t);
    const Mat sinv = s.inverse();
    const Mat sinv_dot = Mat(-sinv * sd * sinv);

    // Block 0: columns 0,1 of S (rank 1, then rank 2); lefts rows 0,1.
    js.blocks[0].eigenvalue.push_back(kL1);
    js.blocks[0].rights.push_back(s.leftCols(2));
    js.blocks[0].lefts.push_back(sinv.topRows(2));
    js.blocks[0].rights_dot.push_back(sd.leftCols(2));
    js.blocks[0].lefts_dot.push_back(sinv_dot.topRows(2));
    // Blocks 1 and 2: single columns 2 and 3.
    for (int b = 1; b <= 2; ++b) {
      const int col = b + 1;
      js.blocks[b].eigenvalue.push_back(b == 1 ? kL3 : kL4);
      js.blocks[b].rights.push_back(s.col(col));
      js.blocks[b].lefts.push_back(sinv.row(col));
      js.blocks[b].rights_dot.push_back(sd.col(col));
      js.blocks[b].lefts_dot.push_back(sinv_dot.row(col));
    }
  }
  return SyntheticHarness{grid, std::move(op), std::move(js), kL1, kL3, kL4,
                          t_mat};
}

JordanStructure corrupt_rank_order(const JordanStructure& js) {
  if (js.blocks.empty() || js.blocks[0].rank() < 2) {
    throw ContractError("corrupt_rank_order: needs a chain of rank >= 2");
  }
  JordanStructure out = js;
  for (std::size_t j = 0; j < out.blocks[0].rights.size(); ++j) {
    out.blocks[0].rights[j].col(0).swap(out.blocks[0].rights[j].col(1));
    out.blocks[0].lefts[j].row(0).swap(out.blocks[0].lefts[j].row(1));
    if (!out.blocks[0].rights_dot.empty()) {
      out.blocks[0].rights_dot[j].col(0).swap(out.blocks[0].rights_dot[j].col(1));
      out.blocks[0].lefts_dot[j].row(0).swap(out.blocks[0].lefts_dot[j].row(1));
    }
  }
  return out;
}

JordanStructure corrupt_lefts(const JordanStructure& js) {
  if (js.blocks.empty()) {
    throw ContractError("corrupt_lefts: empty structure");
  }
  JordanStructure out = js;
  for (std::size_t j = 0; j < out.blocks[0].lefts.size(); ++j) {
    out.blocks[0].lefts[j] *= 1.01;
    if (!out.blocks[0].lefts_dot.empty()) out.blocks[0].lefts_dot[j] *= 1.01;
  }
  return out;
}

}  // namespace ltqd
