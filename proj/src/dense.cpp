#include "spmx/dense.hpp"

#include <cstring>
#include <random>
#include <stdexcept>

namespace spmx {

DenseMatrix random_dense(int64_t rows, int64_t cols, uint64_t seed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("random_dense: zero dimension");
  DenseMatrix x(rows, cols);
  std::mt19937_64 rng(seed);
  for (auto& v : x.data) v = float(rng() >> 40) * 0x1p-24f;
  return x;
}

uint64_t checksum(const DenseMatrix& y) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (float f : y.data) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int s = 0; s < 32; s += 8) {
      h ^= (bits >> s) & 0xff;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

}  // namespace spmx
