// CSR sparse matrix storage, validation and binary cache IO.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spmx {

struct CsrMatrix {
  int64_t m = 0;    // rows
  int64_t n = 0;    // columns
  int64_t nnz = 0;  // nonzeros
  std::vector<uint64_t> row_ptr;      // length m+1
  std::vector<uint32_t> col_indices;  // length nnz
  std::vector<float> vals;            // length nnz

  uint64_t row_nnz(int64_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
  uint64_t max_row_nnz() const;
};

// Returns an empty list when every CSR invariant holds, otherwise one
// message per violation with the offending index.
std::vector<std::string> validate_csr(const CsrMatrix& a);

// Binary cache: magic "JSPM", version u32, m/n/nnz as u64, then
// row_ptr (u64), col_indices (u32), vals (f32), all little-endian.
void save_csr_cache(const CsrMatrix& a, const std::string& path);
CsrMatrix load_csr_cache(const std::string& path);

// Synthetic square matrix: `rows` rows, row lengths around avg_row_nnz
// with a power-law tail controlled by skew (0 = uniform lengths).
// Columns are sorted within each row. Deterministic in the seed.
CsrMatrix random_csr(int64_t rows, double avg_row_nnz, double skew, uint64_t seed);

}  // namespace spmx
