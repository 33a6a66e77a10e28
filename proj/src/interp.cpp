#include "spmx/interp.hpp"

#include <cmath>
#include <stdexcept>

namespace spmx {

namespace {

void check_shapes(const KernelPlan& plan, const CsrMatrix& a, const DenseMatrix& x,
                  const DenseMatrix& y) {
  if (a.n != x.rows) throw std::invalid_argument("interpret: A.n != X.rows");
  if (x.cols != plan.d()) throw std::invalid_argument("interpret: X.cols != plan d");
  if (y.rows != a.m || y.cols != plan.d())
    throw std::invalid_argument("interpret: Y shape mismatch");
}

struct RowCounters {
  uint64_t zero_ops = 0;
  ExecCounters c;
};

// One row, all tiles. Counter model per nonzero and tile of c chunks:
// 2 loads (column index, value broadcast) + c X-slice loads, one fused
// multiply-add per chunk, one branch per iteration plus the exit test.
void run_row(const KernelPlan& plan, const CsrMatrix& a, const DenseMatrix& x, DenseMatrix& y,
             uint64_t row, RowCounters& rc) {
  const uint64_t begin = a.row_ptr[row], end = a.row_ptr[row + 1];
  float* yrow = y.row(int64_t(row));
  for (const Tile& tile : plan.reg.tiles) {
    float acc[16 * 30];  // tile width <= budget * max lanes
    const int width = tile.col_end - tile.col_begin;
    for (int j = 0; j < width; ++j) acc[j] = 0.0f;
    rc.zero_ops += tile.chunks.size();

    for (uint64_t idx = begin; idx < end; ++idx) {
      const uint32_t k = a.col_indices[idx];
      const float v = a.vals[idx];
      rc.c.memory_loads += 2;
      const float* xrow = x.row(k) + tile.col_begin;
      for (const Chunk& ch : tile.chunks) {
        for (int l = 0; l < ch.lanes; ++l)
          acc[ch.col_offset + l] = std::fmaf(v, xrow[ch.col_offset + l], acc[ch.col_offset + l]);
        rc.c.memory_loads += 1;
        if (ch.lanes > 1)
          rc.c.vector_arith += 1;
        else
          rc.c.scalar_arith += 1;
      }
      rc.c.branches += 1;
    }
    rc.c.branches += 1;  // loop exit test

    for (int j = 0; j < width; ++j) yrow[tile.col_begin + j] = acc[j];
    rc.c.stores += tile.chunks.size();
  }
}

ExecCounters finish(RowCounters& rc) {
  rc.c.instructions = rc.c.memory_loads + rc.c.stores + rc.c.branches + rc.c.vector_arith +
                      rc.c.scalar_arith + rc.zero_ops;
  return rc.c;
}

}  // namespace

ExecCounters interpret(const KernelPlan& plan, const CsrMatrix& a, const DenseMatrix& x,
                       DenseMatrix& y, RowRange range) {
  check_shapes(plan, a, x, y);
  RowCounters rc;
  for (uint64_t row = range.begin; row < range.end; ++row) run_row(plan, a, x, y, row, rc);
  return finish(rc);
}

ExecCounters interpret_dynamic(const KernelPlan& plan, const CsrMatrix& a, const DenseMatrix& x,
                               DenseMatrix& y, DispatchCounter& counter) {
  check_shapes(plan, a, x, y);
  if (!plan.dynamic) throw std::invalid_argument("interpret_dynamic: plan has no dispatch config");
  RowCounters rc;
  while (auto batch = next_batch(counter, plan.dynamic->batch_size, uint64_t(a.m))) {
    rc.c.branches += 1;  // successful batch request
    for (uint64_t row = batch->begin; row < batch->end; ++row) run_row(plan, a, x, y, row, rc);
  }
  return finish(rc);
}

ExecCounters counter_model(const CsrMatrix& a, const KernelPlan& plan) {
  const uint64_t m = uint64_t(a.m), nnz = uint64_t(a.nnz);
  ExecCounters c;
  uint64_t zero_ops = 0;
  for (const Tile& tile : plan.reg.tiles) {
    const uint64_t chunks = tile.chunks.size();
    uint64_t vec = 0, sc = 0;
    for (const Chunk& ch : tile.chunks) (ch.lanes > 1 ? vec : sc) += 1;
    c.memory_loads += nnz * (2 + chunks);
    c.vector_arith += nnz * vec;
    c.scalar_arith += nnz * sc;
    c.branches += nnz + m;  // per-iteration tests plus one exit per row
    c.stores += m * chunks;
    zero_ops += m * chunks;
  }
  if (plan.dynamic && m > 0)
    c.branches += (m + plan.dynamic->batch_size - 1) / plan.dynamic->batch_size;
  c.instructions =
      c.memory_loads + c.stores + c.branches + c.vector_arith + c.scalar_arith + zero_ops;
  return c;
}

uint64_t column_loop_branches_per_row(uint64_t row_nnz, int d) {
  return uint64_t(d) * (row_nnz + 1);
}

uint64_t ccm_branches_per_row(const KernelPlan& plan, uint64_t row_nnz) {
  return plan.reg.tiles.size() * (row_nnz + 1);
}

}  // namespace spmx
