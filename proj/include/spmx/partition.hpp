// Workload division: static row-split, dynamic row dispatch, nnz-split
// and merge-split, all at row granularity.
#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "spmx/csr.hpp"

namespace spmx {

enum class Strategy { RowSplit, NnzSplit, MergeSplit };

const char* strategy_name(Strategy s);

struct RowRange {
  uint64_t begin = 0;  // inclusive
  uint64_t end = 0;    // exclusive

  uint64_t size() const { return end - begin; }
  bool operator==(const RowRange&) const = default;
};

struct DispatchConfig {
  uint64_t batch_size = 128;
};

struct WorkPartition {
  Strategy strategy = Strategy::RowSplit;
  std::vector<RowRange> ranges;  // empty under dynamic dispatch
  std::optional<DispatchConfig> dynamic;
};

// Shared counter for dynamic row dispatching; workers claim batches with
// an atomic fetch-add.
struct DispatchCounter {
  std::atomic<uint64_t> next{0};
};

// T contiguous ranges covering [0,m); sizes differ by at most one and the
// first (m mod T) ranges are the larger ones. Throws on T == 0.
std::vector<RowRange> split_rows_static(uint64_t m, unsigned threads);

// Atomically claims the next batch of rows. Returns std::nullopt once the
// counter has passed m. Claimed ranges are disjoint and cover [0,m).
std::optional<RowRange> next_batch(DispatchCounter& counter, uint64_t batch_size, uint64_t m);

// Boundary of thread t is the smallest row r with row_ptr[r] >= t*nnz/T.
std::vector<RowRange> split_nnz(const CsrMatrix& a, unsigned threads);

struct MergeCoordinate {
  uint64_t i = 0;  // rows consumed
  uint64_t j = 0;  // nonzeros consumed
};

// Intersection of diagonal k with the merge path over
// (row end offsets x nonzero indices); row_end[r] == row_ptr[r+1].
// Throws when k > m + nnz.
MergeCoordinate merge_path_search(uint64_t k, const uint64_t* row_end, uint64_t m, uint64_t nnz);

// Diagonal split points ceil(t*(m+nnz)/T) snapped to row boundaries, so
// no row is split across threads.
std::vector<RowRange> split_merge(const CsrMatrix& a, unsigned threads);

WorkPartition make_partition(const CsrMatrix& a, Strategy strategy, unsigned threads,
                             bool dynamic_dispatch, uint64_t batch_size);

}  // namespace spmx
