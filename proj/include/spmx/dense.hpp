// Row-major dense matrix and deterministic random fill.
#pragma once

#include <cstdint>
#include <vector>

namespace spmx {

struct DenseMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<float> data;  // rows*cols, row-major

  DenseMatrix() = default;
  DenseMatrix(int64_t r, int64_t c) : rows(r), cols(c), data(size_t(r) * size_t(c), 0.0f) {}

  float& at(int64_t i, int64_t j) { return data[size_t(i) * cols + j]; }
  float at(int64_t i, int64_t j) const { return data[size_t(i) * cols + j]; }
  const float* row(int64_t i) const { return data.data() + size_t(i) * cols; }
  float* row(int64_t i) { return data.data() + size_t(i) * cols; }
};

// Uniform values in [0,1): mt19937_64 stream, one draw per element in
// row-major order, top 24 bits scaled by 2^-24. Stable across platforms.
DenseMatrix random_dense(int64_t rows, int64_t cols, uint64_t seed);

// FNV-1a over the raw f32 bytes of `data`.
uint64_t checksum(const DenseMatrix& y);

}  // namespace spmx
