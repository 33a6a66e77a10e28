#include "spmx/reference.hpp"

#include <stdexcept>

namespace spmx {

// Build with -ffp-contract=off so the multiply-add below stays unfused;
// the JIT backends use fused ops and are compared against this within a
// small tolerance.
DenseMatrix spmm_reference(const CsrMatrix& a, const DenseMatrix& x) {
  if (a.n != x.rows) throw std::invalid_argument("spmm_reference: A.n != X.rows");
  const int64_t d = x.cols;
  DenseMatrix y(a.m, d);
  for (int64_t i = 0; i < a.m; ++i) {
    for (int64_t j = 0; j < d; ++j) {
      float ret = 0.0f;
      for (uint64_t idx = a.row_ptr[i]; idx < a.row_ptr[i + 1]; ++idx) {
        uint32_t k = a.col_indices[idx];
        ret += a.vals[idx] * x.at(k, j);
      }
      y.at(i, j) = ret;
    }
  }
  return y;
}

}  // namespace spmx
