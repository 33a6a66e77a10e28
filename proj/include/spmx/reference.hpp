// Serial scalar SpMM reference: Y = A * X with unfused multiply-add,
// accumulating each row's nonzeros in CSR order.
#pragma once

#include "spmx/csr.hpp"
#include "spmx/dense.hpp"

namespace spmx {

// Throws std::invalid_argument when A.n != X.rows.
DenseMatrix spmm_reference(const CsrMatrix& a, const DenseMatrix& x);

}  // namespace spmx
