// Portable kernel-plan interpreter with fused multiply-add semantics.
// Serves as the bitwise oracle for the native backend and as a
// deterministic profiler of the virtual-op counters.
#pragma once

#include "spmx/counters.hpp"
#include "spmx/csr.hpp"
#include "spmx/dense.hpp"
#include "spmx/plan.hpp"

namespace spmx {

// Computes Y rows in [range.begin, range.end) exactly as the plan
// prescribes. Y must be preallocated with shape (A.m, plan.d()).
// Safe to call concurrently on disjoint ranges of a shared Y.
ExecCounters interpret(const KernelPlan& plan, const CsrMatrix& a, const DenseMatrix& x,
                       DenseMatrix& y, RowRange range);

// Dynamic-dispatch variant: claims batches from the shared counter until
// the matrix is exhausted. Each successful batch request adds one branch.
ExecCounters interpret_dynamic(const KernelPlan& plan, const CsrMatrix& a, const DenseMatrix& x,
                               DenseMatrix& y, DispatchCounter& counter);

// Closed-form counter prediction for a whole-matrix run; equals the sum
// of interpret() counters over any exact row cover, field by field.
ExecCounters counter_model(const CsrMatrix& a, const KernelPlan& plan);

// Branch count per row under the column-loop model an AOT build is stuck
// with: one test per column iteration plus its exit, d*(z+1).
uint64_t column_loop_branches_per_row(uint64_t row_nnz, int d);

// z+1 for a single-tile plan, tiles*(z+1) in general.
uint64_t ccm_branches_per_row(const KernelPlan& plan, uint64_t row_nnz);

}  // namespace spmx
