#include <doctest.h>

#include <random>
#include <thread>

#include "oracles.hpp"
#include "spmx/partition.hpp"

using namespace spmx;

namespace {

bool exact_cover(const std::vector<RowRange>& ranges, uint64_t m) {
  uint64_t expect = 0;
  for (const RowRange& r : ranges) {
    if (r.begin != expect || r.end < r.begin) return false;
    expect = r.end;
  }
  return expect == m;
}

CsrMatrix from_row_lengths(std::initializer_list<uint64_t> lens) {
  CsrMatrix a;
  a.m = int64_t(lens.size());
  a.n = 1;
  a.row_ptr.assign(1, 0);
  for (uint64_t l : lens) a.row_ptr.push_back(a.row_ptr.back() + l);
  a.nnz = int64_t(a.row_ptr.back());
  a.col_indices.assign(a.nnz, 0);
  a.vals.assign(a.nnz, 1.0f);
  return a;
}

}  // namespace

TEST_CASE("split_rows_static ceil-first distribution") {
  CHECK(split_rows_static(10, 4) ==
        std::vector<RowRange>{{0, 3}, {3, 6}, {6, 8}, {8, 10}});
  CHECK(split_rows_static(4, 4) == std::vector<RowRange>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK(split_rows_static(2, 4) == std::vector<RowRange>{{0, 1}, {1, 2}, {2, 2}, {2, 2}});
  CHECK_THROWS_AS(split_rows_static(5, 0), std::invalid_argument);
}

TEST_CASE("next_batch sequential semantics") {
  DispatchCounter c;
  CHECK(next_batch(c, 128, 300) == RowRange{0, 128});
  CHECK(next_batch(c, 128, 300) == RowRange{128, 256});
  CHECK(next_batch(c, 128, 300) == RowRange{256, 300});
  CHECK(!next_batch(c, 128, 300));
  DispatchCounter empty;
  CHECK(!next_batch(empty, 128, 0));
}

TEST_CASE("next_batch concurrent exact cover") {
  const uint64_t m = 1000;
  for (int round = 0; round < 20; ++round) {
    DispatchCounter c;
    std::vector<std::vector<RowRange>> got(4);
    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t)
      workers.emplace_back([&, t] {
        while (auto r = next_batch(c, 7, m)) {
          got[t].push_back(*r);
          if ((r->begin / 7) % 3 == uint64_t(t) % 3) std::this_thread::yield();
        }
      });
    for (auto& w : workers) w.join();
    std::vector<int> seen(m, 0);
    for (auto& ranges : got)
      for (auto& r : ranges)
        for (uint64_t i = r.begin; i < r.end; ++i) seen[i]++;
    for (uint64_t i = 0; i < m; ++i) REQUIRE(seen[i] == 1);
  }
}

TEST_CASE("split_nnz worked examples") {
  CsrMatrix a = from_row_lengths({4, 1, 1, 2});
  CHECK(split_nnz(a, 2) == std::vector<RowRange>{{0, 1}, {1, 4}});
  CHECK(split_nnz(a, 1) == std::vector<RowRange>{{0, 4}});
  CsrMatrix zeros = from_row_lengths({0, 0, 0});
  CHECK(split_nnz(zeros, 2) == std::vector<RowRange>{{0, 0}, {0, 3}});
  CHECK_THROWS_AS(split_nnz(a, 0), std::invalid_argument);
}

TEST_CASE("merge_path_search endpoints and worked example") {
  CsrMatrix a = from_row_lengths({4, 1, 1, 2});
  const uint64_t* row_end = a.row_ptr.data() + 1;
  auto at = [&](uint64_t k) { return merge_path_search(k, row_end, 4, 8); };
  CHECK(at(0).i == 0);
  CHECK(at(0).j == 0);
  CHECK(at(12).i == 4);
  CHECK(at(12).j == 8);
  CHECK(at(6).i == 1);
  CHECK(at(6).j == 5);
  CHECK_THROWS_AS(at(13), std::invalid_argument);
}

TEST_CASE("merge_path_search agrees with the sequential walk and is monotone") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 200; ++it) {
    CsrMatrix a = test::random_csr_rect(1 + int64_t(rng() % 30), 20, 0.2, rng);
    const uint64_t* row_end = a.row_ptr.data() + 1;
    const uint64_t m = uint64_t(a.m), nnz = uint64_t(a.nnz);
    uint64_t prev_i = 0, prev_j = 0;
    for (uint64_t k = 0; k <= m + nnz; ++k) {
      MergeCoordinate got = merge_path_search(k, row_end, m, nnz);
      MergeCoordinate want = test::merge_walk(k, row_end, m, nnz);
      REQUIRE(got.i == want.i);
      REQUIRE(got.j == want.j);
      REQUIRE(got.i + got.j == k);
      REQUIRE(got.i >= prev_i);
      REQUIRE(got.j >= prev_j);
      prev_i = got.i;
      prev_j = got.j;
    }
  }
}

TEST_CASE("split_merge worked examples") {
  CsrMatrix a = from_row_lengths({4, 1, 1, 2});
  CHECK(split_merge(a, 2) == std::vector<RowRange>{{0, 1}, {1, 4}});
  CHECK(split_merge(a, 1) == std::vector<RowRange>{{0, 4}});
  // uniform rows, T divides m: equal ranges
  CsrMatrix u = from_row_lengths({3, 3, 3, 3, 3, 3});
  CHECK(split_merge(u, 3) == std::vector<RowRange>{{0, 2}, {2, 4}, {4, 6}});
}

TEST_CASE("partition properties over random instances") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 300; ++it) {
    int64_t m = int64_t(rng() % 200);
    CsrMatrix a = test::random_csr_rect(m, 30, 0.25 * (rng() % 100) / 100.0, rng);
    unsigned t = 1 + unsigned(rng() % 16);
    const uint64_t max_row = a.max_row_nnz();

    auto rows = split_rows_static(uint64_t(m), t);
    auto nnzs = split_nnz(a, t);
    auto merges = split_merge(a, t);
    CHECK(exact_cover(rows, uint64_t(m)));
    CHECK(exact_cover(nnzs, uint64_t(m)));
    CHECK(exact_cover(merges, uint64_t(m)));

    // nnz-split: each thread within one max-row-length of the ideal share
    for (unsigned i = 0; i < t; ++i) {
      double ideal = double(a.nnz) / t;
      double assigned = double(a.row_ptr[nnzs[i].end] - a.row_ptr[nnzs[i].begin]);
      CHECK(std::abs(assigned - ideal) <= double(max_row) + 1e-9);
    }

    // merge-split: rows+nnz per thread bounded by share + heaviest row
    uint64_t share = (uint64_t(a.m) + uint64_t(a.nnz) + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
      uint64_t work = merges[i].size() + a.row_ptr[merges[i].end] - a.row_ptr[merges[i].begin];
      CHECK(work <= share + (1 + max_row));
    }
  }
}

TEST_CASE("make_partition wiring") {
  CsrMatrix a = from_row_lengths({2, 2, 2});
  WorkPartition p = make_partition(a, Strategy::RowSplit, 4, true, 128);
  CHECK(p.dynamic.has_value());
  CHECK(p.ranges.empty());
  CHECK_THROWS_AS(make_partition(a, Strategy::NnzSplit, 4, true, 128), std::invalid_argument);
  CHECK_THROWS_AS(make_partition(a, Strategy::RowSplit, 4, true, 0), std::invalid_argument);
  WorkPartition s = make_partition(a, Strategy::MergeSplit, 2, false, 128);
  CHECK(s.ranges.size() == 2);
}
