// Virtual-op counters reported by the interpreter backend.
#pragma once

#include <cstdint>

namespace spmx {

// Arithmetic counters cover multiply-add ops only; accumulator zeroing
// contributes to `instructions` but to no component counter.
struct ExecCounters {
  uint64_t memory_loads = 0;  // column index, value broadcast, X slices
  uint64_t stores = 0;        // one per chunk per row
  uint64_t branches = 0;      // nnz-loop tests, loop exits, batch requests
  uint64_t vector_arith = 0;  // packed fused multiply-adds
  uint64_t scalar_arith = 0;  // scalar fused multiply-adds
  uint64_t instructions = 0;  // every executed virtual op

  ExecCounters& operator+=(const ExecCounters& o) {
    memory_loads += o.memory_loads;
    stores += o.stores;
    branches += o.branches;
    vector_arith += o.vector_arith;
    scalar_arith += o.scalar_arith;
    instructions += o.instructions;
    return *this;
  }
  bool operator==(const ExecCounters&) const = default;
};

}  // namespace spmx
