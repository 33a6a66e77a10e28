#include "spmx/mmio.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace spmx {

namespace {

[[noreturn]] void parse_error(const std::string& path, long line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

CsrMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);

  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) parse_error(path, 1, "empty file");
  ++lineno;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix")
    parse_error(path, lineno, "missing MatrixMarket banner");
  if (format == "array") parse_error(path, lineno, "array (dense) format not supported");
  if (format != "coordinate") parse_error(path, lineno, "unknown format class: " + format);
  bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer")
    parse_error(path, lineno, "unsupported field type: " + field);
  bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    parse_error(path, lineno, "unsupported symmetry: " + symmetry);

  // size line (skipping % comments)
  int64_t m = 0, n = 0, entries = 0;
  for (;;) {
    if (!std::getline(in, line)) parse_error(path, lineno, "missing size line");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sz(line);
    if (!(sz >> m >> n >> entries)) parse_error(path, lineno, "bad size line");
    break;
  }
  if (m < 0 || n < 0 || entries < 0) parse_error(path, lineno, "negative size");

  std::vector<std::tuple<int64_t, int64_t, float>> trip;
  trip.reserve(symmetric ? 2 * entries : entries);
  for (int64_t e = 0; e < entries;) {
    if (!std::getline(in, line)) parse_error(path, lineno, "unexpected end of file");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    int64_t i, j;
    double v = 1.0;
    if (!(es >> i >> j) || (!pattern && !(es >> v)))
      parse_error(path, lineno, "bad entry");
    if (i < 1 || i > m || j < 1 || j > n)
      parse_error(path, lineno, "entry index out of range");
    trip.emplace_back(i - 1, j - 1, float(v));
    if (symmetric && i != j) trip.emplace_back(j - 1, i - 1, float(v));
    ++e;
  }

  std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });

  CsrMatrix a;
  a.m = m;
  a.n = n;
  a.row_ptr.assign(m + 1, 0);
  for (size_t k = 0; k < trip.size();) {
    auto [i, j, v] = trip[k];
    float sum = v;
    size_t k2 = k + 1;
    while (k2 < trip.size() && std::get<0>(trip[k2]) == i && std::get<1>(trip[k2]) == j)
      sum += std::get<2>(trip[k2++]);
    a.col_indices.push_back(uint32_t(j));
    a.vals.push_back(sum);
    a.row_ptr[i + 1]++;
    k = k2;
  }
  for (int64_t i = 0; i < m; ++i) a.row_ptr[i + 1] += a.row_ptr[i];
  a.nnz = int64_t(a.col_indices.size());
  return a;
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.m << " " << a.n << " " << a.nnz << "\n";
  char buf[64];
  for (int64_t i = 0; i < a.m; ++i)
    for (uint64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%lld %u %.9g\n", (long long)(i + 1),
                    a.col_indices[k] + 1, double(a.vals[k]));
      out << buf;
    }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace spmx
