#include "spmx/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace spmx {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::RowSplit: return "row";
    case Strategy::NnzSplit: return "nnz";
    case Strategy::MergeSplit: return "merge";
  }
  return "?";
}

std::vector<RowRange> split_rows_static(uint64_t m, unsigned threads) {
  if (threads == 0) throw std::invalid_argument("split_rows_static: zero threads");
  std::vector<RowRange> ranges(threads);
  uint64_t base = m / threads, rem = m % threads, begin = 0;
  for (unsigned t = 0; t < threads; ++t) {
    uint64_t size = base + (t < rem ? 1 : 0);
    ranges[t] = {begin, begin + size};
    begin += size;
  }
  return ranges;
}

std::optional<RowRange> next_batch(DispatchCounter& counter, uint64_t batch_size, uint64_t m) {
  uint64_t v = counter.next.fetch_add(batch_size, std::memory_order_relaxed);
  if (v >= m) return std::nullopt;
  return RowRange{v, std::min(v + batch_size, m)};
}

std::vector<RowRange> split_nnz(const CsrMatrix& a, unsigned threads) {
  if (threads == 0) throw std::invalid_argument("split_nnz: zero threads");
  const uint64_t m = a.m, nnz = a.nnz;
  std::vector<RowRange> ranges(threads);
  uint64_t prev = 0;
  for (unsigned t = 1; t < threads; ++t) {
    // smallest r with row_ptr[r] >= t*nnz/T, i.e. row_ptr[r]*T >= t*nnz
    uint64_t target = (uint64_t(t) * nnz + threads - 1) / threads;
    uint64_t r = std::lower_bound(a.row_ptr.begin(), a.row_ptr.end(), target) -
                 a.row_ptr.begin();
    r = std::max(prev, std::min(r, m));
    ranges[t - 1] = {prev, r};
    prev = r;
  }
  ranges[threads - 1] = {prev, m};
  return ranges;
}

MergeCoordinate merge_path_search(uint64_t k, const uint64_t* row_end, uint64_t m,
                                  uint64_t nnz) {
  if (k > m + nnz) throw std::invalid_argument("merge_path_search: diagonal out of range");
  uint64_t lo = k > nnz ? k - nnz : 0;
  uint64_t hi = std::min(k, m);
  while (lo < hi) {
    uint64_t mid = lo + (hi - lo) / 2;
    // consume the row end when all of its nonzeros precede the diagonal
    if (row_end[mid] <= k - mid - 1)
      lo = mid + 1;
    else
      hi = mid;
  }
  return {lo, k - lo};
}

std::vector<RowRange> split_merge(const CsrMatrix& a, unsigned threads) {
  if (threads == 0) throw std::invalid_argument("split_merge: zero threads");
  const uint64_t m = a.m, nnz = a.nnz;
  const uint64_t* row_end = a.row_ptr.data() + 1;
  std::vector<RowRange> ranges(threads);
  uint64_t prev = 0;
  for (unsigned t = 1; t < threads; ++t) {
    uint64_t k = (uint64_t(t) * (m + nnz) + threads - 1) / threads;
    uint64_t r = merge_path_search(k, row_end, m, nnz).i;
    r = std::max(prev, r);
    ranges[t - 1] = {prev, r};
    prev = r;
  }
  ranges[threads - 1] = {prev, m};
  return ranges;
}

WorkPartition make_partition(const CsrMatrix& a, Strategy strategy, unsigned threads,
                             bool dynamic_dispatch, uint64_t batch_size) {
  if (threads == 0) throw std::invalid_argument("make_partition: zero threads");
  WorkPartition p;
  p.strategy = strategy;
  if (dynamic_dispatch) {
    if (strategy != Strategy::RowSplit)
      throw std::invalid_argument("dynamic dispatch pairs with row-split only");
    if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
    p.dynamic = DispatchConfig{batch_size};
    return p;
  }
  switch (strategy) {
    case Strategy::RowSplit: p.ranges = split_rows_static(a.m, threads); break;
    case Strategy::NnzSplit: p.ranges = split_nnz(a, threads); break;
    case Strategy::MergeSplit: p.ranges = split_merge(a, threads); break;
  }
  return p;
}

}  // namespace spmx
