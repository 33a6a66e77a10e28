// Matrix Market coordinate-format reader/writer.
#pragma once

#include <string>

#include "spmx/csr.hpp"

namespace spmx {

// Loads a coordinate-format file (real/integer/pattern, general/symmetric)
// into canonical CSR: entries sorted by row then column, symmetric files
// expanded to both triangles, duplicates summed, pattern values set to 1.
// Throws std::runtime_error with a line number on malformed input and
// rejects the array (dense) format class.
CsrMatrix load_matrix_market(const std::string& path);

// Writes the matrix back as "matrix coordinate real general", 1-based.
void write_matrix_market(const CsrMatrix& a, const std::string& path);

}  // namespace spmx
