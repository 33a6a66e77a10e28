#include "spmx/executor.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "spmx/interp.hpp"
#include "spmx/jit.hpp"
#include "spmx/reference.hpp"

namespace spmx {

const char* backend_name(Backend b) { return b == Backend::Native ? "native" : "interp"; }

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

double max_relative_error(const DenseMatrix& y, const DenseMatrix& ref) {
  double worst = 0.0;
  for (size_t i = 0; i < y.data.size(); ++i) {
    double denom = std::max(std::fabs(double(ref.data[i])), 1e-6);
    worst = std::max(worst, std::fabs(double(y.data[i]) - double(ref.data[i])) / denom);
  }
  return worst;
}

std::pair<DenseMatrix, RunReport> run_spmm(const CsrMatrix& a, const DenseMatrix& x,
                                           const RunConfig& cfg) {
  if (a.n != x.rows) throw std::invalid_argument("run_spmm: A.n != X.rows");
  if (cfg.trials < 1) throw std::invalid_argument("run_spmm: trials must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("run_spmm: batch_size must be >= 1");

  const unsigned threads = cfg.threads ? cfg.threads : unsigned(omp_get_max_threads());
  const int d = int(x.cols);
  const bool dynamic = cfg.dynamic_dispatch && cfg.strategy == Strategy::RowSplit;
  if (cfg.dynamic_dispatch && cfg.strategy != Strategy::RowSplit)
    throw std::invalid_argument("dynamic dispatch pairs with row-split only");

  RunReport report;
  report.threads = threads;
  report.tier = cfg.backend == Backend::Native ? detect_tier(cfg.tier_cap)
                : cfg.tier_cap.value_or(detect_tier());

  // plan + codegen once per run, before workers exist
  double t0 = now_s();
  KernelPlan plan = build_kernel(
      d, report.tier, cfg.strategy,
      dynamic ? std::optional<DispatchConfig>{DispatchConfig{cfg.batch_size}} : std::nullopt);
  std::optional<ExecutableKernel> kernel;
  if (cfg.backend == Backend::Native) kernel.emplace(emit(plan));
  report.codegen_s = now_s() - t0;

  WorkPartition part = make_partition(a, cfg.strategy, threads, dynamic, cfg.batch_size);

  DenseMatrix y(a.m, d);
  ExecCounters merged;
  for (unsigned trial = 0; trial < cfg.trials; ++trial) {
    DispatchCounter counter;
    merged = ExecCounters{};
    double start = now_s();
#pragma omp parallel num_threads(int(threads))
    {
      const unsigned t = unsigned(omp_get_thread_num());
      if (cfg.backend == Backend::Native) {
        // the generated lock-xadd operates directly on the atomic's storage
        static_assert(sizeof(DispatchCounter::next) == 8 &&
                      std::atomic<uint64_t>::is_always_lock_free);
        KernelArgs args{a.row_ptr.data(), a.col_indices.data(), a.vals.data(),
                        x.data.data(),    y.data.data(),        0,
                        0,                reinterpret_cast<uint64_t*>(&counter.next),
                        uint64_t(a.m)};
        if (dynamic) {
          (*kernel)(args);
        } else if (t < part.ranges.size()) {
          args.row_begin = part.ranges[t].begin;
          args.row_end = part.ranges[t].end;
          (*kernel)(args);
        }
      } else {
        ExecCounters local;
        if (dynamic)
          local = interpret_dynamic(plan, a, x, y, counter);
        else if (t < part.ranges.size())
          local = interpret(plan, a, x, y, part.ranges[t]);
#pragma omp critical
        merged += local;
      }
    }
    report.times_s.push_back(now_s() - start);
  }

  double sum = 0.0;
  for (double t : report.times_s) sum += t;
  report.mean_s = sum / report.times_s.size();
  report.gflops = report.mean_s > 0.0
                      ? 2.0 * double(a.nnz) * double(d) / report.mean_s / 1e9
                      : 0.0;
  if (cfg.collect_counters)
    report.counters =
        cfg.backend == Backend::Interp ? merged : counter_model(a, plan);
  if (cfg.verify) report.max_rel_err = max_relative_error(y, spmm_reference(a, x));
  return {std::move(y), std::move(report)};
}

}  // namespace spmx
