#pragma once

#include <Eigen/Core>

namespace mribench::nn {

using RowMat =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

// C (m x n) = op(A) * op(B), row-major buffers. op transposes the stored
// matrix: with trans_a the stored A is (k x m), with trans_b stored B is
// (n x k). accumulate adds into C instead of overwriting.
inline void matmul(const float* a, const float* b, float* c, int m, int k,
                   int n, bool trans_a = false, bool trans_b = false,
                   bool accumulate = false) {
  MapMat C(c, m, n);
  auto run = [&](const auto& A, const auto& B) {
    if (accumulate) {
      C.noalias() += A * B;
    } else {
      C.noalias() = A * B;
    }
  };
  if (!trans_a && !trans_b) {
    run(ConstMapMat(a, m, k), ConstMapMat(b, k, n));
  } else if (trans_a && !trans_b) {
    run(ConstMapMat(a, k, m).transpose(), ConstMapMat(b, k, n));
  } else if (!trans_a && trans_b) {
    run(ConstMapMat(a, m, k), ConstMapMat(b, n, k).transpose());
  } else {
    run(ConstMapMat(a, k, m).transpose(), ConstMapMat(b, n, k).transpose());
  }
}

}  // namespace mribench::nn
