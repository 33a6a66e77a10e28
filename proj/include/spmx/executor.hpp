// Fork-join orchestration: build the plan, emit the kernel once, run T
// workers under the configured workload division, return Y and a report.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spmx/counters.hpp"
#include "spmx/csr.hpp"
#include "spmx/dense.hpp"
#include "spmx/plan.hpp"

namespace spmx {

enum class Backend { Native, Interp };

const char* backend_name(Backend b);

struct RunConfig {
  Strategy strategy = Strategy::RowSplit;
  bool dynamic_dispatch = true;  // RowSplit only
  unsigned threads = 0;          // 0 = hardware logical cores
  Backend backend = Backend::Native;
  std::optional<SimdTier> tier_cap;
  uint64_t batch_size = 128;
  bool verify = false;
  unsigned trials = 1;
  bool collect_counters = false;
};

struct RunReport {
  std::vector<double> times_s;  // one wall time per trial
  double mean_s = 0.0;
  double codegen_s = 0.0;
  double gflops = 0.0;  // 2*nnz*d / mean_s / 1e9
  SimdTier tier = SimdTier::Scalar;
  unsigned threads = 0;
  std::optional<ExecCounters> counters;     // merged over workers
  std::optional<double> max_rel_err;        // when verify is set
};

// Runs Y = A*X. Throws on dimension mismatch or unsupported backend/tier.
std::pair<DenseMatrix, RunReport> run_spmm(const CsrMatrix& a, const DenseMatrix& x,
                                           const RunConfig& cfg);

// Relative error with a 1e-6 floor on the reference magnitude.
double max_relative_error(const DenseMatrix& y, const DenseMatrix& ref);

inline constexpr double kVerifyTolerance = 1e-5;

}  // namespace spmx
