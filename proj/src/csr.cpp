#include "spmx/csr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <stdexcept>

namespace spmx {

uint64_t CsrMatrix::max_row_nnz() const {
  uint64_t mx = 0;
  for (int64_t i = 0; i < m; ++i) mx = std::max(mx, row_nnz(i));
  return mx;
}

std::vector<std::string> validate_csr(const CsrMatrix& a) {
  std::vector<std::string> v;
  if (a.m < 0 || a.n < 0 || a.nnz < 0) v.push_back("negative dimension");
  if (a.row_ptr.size() != size_t(a.m) + 1) {
    v.push_back("row_ptr length " + std::to_string(a.row_ptr.size()) + " != m+1");
    return v;  // offset checks below would be meaningless
  }
  if (!a.row_ptr.empty() && a.row_ptr[0] != 0) v.push_back("row_ptr[0] != 0");
  if (a.row_ptr[a.m] != uint64_t(a.nnz))
    v.push_back("row_ptr[m] = " + std::to_string(a.row_ptr[a.m]) + " != nnz");
  for (int64_t i = 0; i < a.m; ++i)
    if (a.row_ptr[i + 1] < a.row_ptr[i]) {
      v.push_back("row_ptr not nondecreasing at " + std::to_string(i + 1));
      break;
    }
  if (a.col_indices.size() != size_t(a.nnz))
    v.push_back("col_indices length != nnz");
  if (a.vals.size() != size_t(a.nnz)) v.push_back("vals length != nnz");
  for (size_t k = 0; k < a.col_indices.size(); ++k)
    if (int64_t(a.col_indices[k]) >= a.n) {
      v.push_back("column index out of range at " + std::to_string(k));
      break;
    }
  return v;
}

namespace {

constexpr char kMagic[4] = {'J', 'S', 'P', 'M'};
constexpr uint32_t kVersion = 1;

void write_exact(FILE* f, const void* p, size_t bytes, const std::string& path) {
  if (std::fwrite(p, 1, bytes, f) != bytes)
    throw std::runtime_error("short write: " + path);
}

void read_exact(FILE* f, void* p, size_t bytes, const std::string& path) {
  if (std::fread(p, 1, bytes, f) != bytes)
    throw std::runtime_error("truncated cache file: " + path);
}

struct FileCloser {
  void operator()(FILE* f) const { std::fclose(f); }
};

}  // namespace

void save_csr_cache(const CsrMatrix& a, const std::string& path) {
  std::unique_ptr<FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  write_exact(f.get(), kMagic, 4, path);
  write_exact(f.get(), &kVersion, 4, path);
  uint64_t dims[3] = {uint64_t(a.m), uint64_t(a.n), uint64_t(a.nnz)};
  write_exact(f.get(), dims, sizeof dims, path);
  write_exact(f.get(), a.row_ptr.data(), a.row_ptr.size() * 8, path);
  write_exact(f.get(), a.col_indices.data(), a.col_indices.size() * 4, path);
  write_exact(f.get(), a.vals.data(), a.vals.size() * 4, path);
}

CsrMatrix load_csr_cache(const std::string& path) {
  std::unique_ptr<FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  uint32_t version;
  read_exact(f.get(), magic, 4, path);
  if (!std::equal(magic, magic + 4, kMagic))
    throw std::runtime_error("not a JSPM cache file: " + path);
  read_exact(f.get(), &version, 4, path);
  if (version != kVersion)
    throw std::runtime_error("unsupported cache version " + std::to_string(version));
  uint64_t dims[3];
  read_exact(f.get(), dims, sizeof dims, path);
  CsrMatrix a;
  a.m = int64_t(dims[0]);
  a.n = int64_t(dims[1]);
  a.nnz = int64_t(dims[2]);
  a.row_ptr.resize(a.m + 1);
  a.col_indices.resize(a.nnz);
  a.vals.resize(a.nnz);
  read_exact(f.get(), a.row_ptr.data(), a.row_ptr.size() * 8, path);
  read_exact(f.get(), a.col_indices.data(), a.col_indices.size() * 4, path);
  read_exact(f.get(), a.vals.data(), a.vals.size() * 4, path);
  auto violations = validate_csr(a);
  if (!violations.empty())
    throw std::runtime_error("invalid CSR in cache " + path + ": " + violations.front());
  return a;
}

CsrMatrix random_csr(int64_t rows, double avg_row_nnz, double skew, uint64_t seed) {
  if (rows < 0 || avg_row_nnz < 0) throw std::invalid_argument("random_csr: bad shape");
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return double(rng() >> 11) * 0x1p-53; };

  CsrMatrix a;
  a.m = a.n = rows;
  a.row_ptr.resize(rows + 1, 0);
  std::vector<uint32_t> lens(rows);
  for (int64_t i = 0; i < rows; ++i) {
    double u = uniform();
    // skew=0: constant length; skew>0: heavy upper tail.
    double len = avg_row_nnz * (skew > 0 ? std::pow(std::max(u, 1e-9), -skew) * (1.0 - skew)
                                         : 1.0);
    lens[i] = uint32_t(std::min(double(rows), std::max(0.0, std::floor(len + uniform()))));
    a.row_ptr[i + 1] = a.row_ptr[i] + lens[i];
  }
  a.nnz = int64_t(a.row_ptr[rows]);
  a.col_indices.resize(a.nnz);
  a.vals.resize(a.nnz);
  for (int64_t i = 0; i < rows; ++i) {
    uint32_t* cols = a.col_indices.data() + a.row_ptr[i];
    for (uint32_t k = 0; k < lens[i]; ++k) cols[k] = uint32_t(rng() % uint64_t(rows));
    std::sort(cols, cols + lens[i]);
  }
  for (auto& v : a.vals) v = float(rng() >> 40) * 0x1p-24f;
  return a;
}

}  // namespace spmx
