#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "spmx/executor.hpp"
#include "spmx/interp.hpp"
#include "spmx/reference.hpp"

using namespace spmx;

namespace {

bool host_has(SimdTier tier) {
  try {
    detect_tier(tier);
    return true;
  } catch (const std::runtime_error&) {
    return false;
  }
}

CsrMatrix identity(int64_t n) {
  CsrMatrix a;
  a.m = a.n = a.nnz = n;
  a.row_ptr.resize(size_t(n) + 1);
  for (int64_t i = 0; i <= n; ++i) a.row_ptr[size_t(i)] = uint64_t(i);
  for (int64_t i = 0; i < n; ++i) {
    a.col_indices.push_back(uint32_t(i));
    a.vals.push_back(1.0f);
  }
  return a;
}

std::vector<RunConfig> all_configs(Backend backend, unsigned threads) {
  std::vector<RunConfig> out;
  for (Strategy s : {Strategy::RowSplit, Strategy::NnzSplit, Strategy::MergeSplit})
    for (bool dyn : {false, true}) {
      if (dyn && s != Strategy::RowSplit) continue;
      RunConfig cfg;
      cfg.strategy = s;
      cfg.dynamic_dispatch = dyn;
      cfg.threads = threads;
      cfg.backend = backend;
      cfg.batch_size = 16;
      out.push_back(cfg);
    }
  return out;
}

}  // namespace

TEST_CASE("identity matrix returns X bitwise under every configuration") {
  CsrMatrix a = identity(64);
  DenseMatrix x = random_dense(64, 45, 3);
  for (Backend backend : {Backend::Interp, Backend::Native}) {
    if (backend == Backend::Native && !host_has(SimdTier::V256)) continue;
    for (unsigned t : {1u, 3u, 8u})
      for (const RunConfig& cfg : all_configs(backend, t)) {
        auto [y, report] = run_spmm(a, x, cfg);
        REQUIRE(y.data == x.data);
        CHECK(report.threads == t);
      }
  }
}

TEST_CASE("result is invariant across strategies, backends and thread counts") {
  std::mt19937_64 rng(51);
  CsrMatrix a = test::random_csr_rect(200, 200, 0.05, rng);
  DenseMatrix x = random_dense(200, 45, 9);
  RunConfig base;
  base.strategy = Strategy::RowSplit;
  base.dynamic_dispatch = false;
  base.threads = 1;
  base.backend = Backend::Interp;
  uint64_t want = checksum(run_spmm(a, x, base).first);
  int checked = 0;
  for (Backend backend : {Backend::Interp, Backend::Native}) {
    if (backend == Backend::Native && !host_has(SimdTier::V256)) continue;
    for (unsigned t : {1u, 2u, 4u, 7u})
      for (const RunConfig& cfg : all_configs(backend, t)) {
        REQUIRE(checksum(run_spmm(a, x, cfg).first) == want);
        ++checked;
      }
  }
  CHECK(checked >= 16);
}

TEST_CASE("interp backend equals native backend bitwise per tier") {
  if (!host_has(SimdTier::V256)) return;
  std::mt19937_64 rng(52);
  for (SimdTier tier : {SimdTier::V256, SimdTier::V512}) {
    if (!host_has(tier)) continue;
    CsrMatrix a = test::random_csr_rect(90, 70, 0.1, rng);
    DenseMatrix x = random_dense(70, 33, rng());
    RunConfig cfg;
    cfg.strategy = Strategy::MergeSplit;
    cfg.dynamic_dispatch = false;
    cfg.threads = 4;
    cfg.tier_cap = tier;
    cfg.backend = Backend::Interp;
    DenseMatrix yi = run_spmm(a, x, cfg).first;
    cfg.backend = Backend::Native;
    auto [yn, report] = run_spmm(a, x, cfg);
    CHECK(yi.data == yn.data);
    CHECK(report.tier == tier);
  }
}

TEST_CASE("verification reports the error against the reference") {
  std::mt19937_64 rng(53);
  CsrMatrix a = test::random_csr_rect(80, 80, 0.1, rng);
  DenseMatrix x = random_dense(80, 20, 1);
  RunConfig cfg;
  cfg.backend = Backend::Interp;
  cfg.threads = 2;
  cfg.verify = true;
  auto [y, report] = run_spmm(a, x, cfg);
  REQUIRE(report.max_rel_err.has_value());
  CHECK(*report.max_rel_err <= kVerifyTolerance);
  CHECK(*report.max_rel_err == max_relative_error(y, spmm_reference(a, x)));
}

TEST_CASE("counters merge over workers to the whole-matrix model") {
  std::mt19937_64 rng(54);
  CsrMatrix a = test::random_csr_rect(120, 60, 0.12, rng);
  DenseMatrix x = random_dense(60, 45, 2);
  ExecCounters want =
      counter_model(a, build_kernel(45, SimdTier::V512, Strategy::NnzSplit));
  for (Backend backend : {Backend::Interp, Backend::Native}) {
    if (backend == Backend::Native && !host_has(SimdTier::V512)) continue;
    RunConfig cfg;
    cfg.strategy = Strategy::NnzSplit;
    cfg.dynamic_dispatch = false;
    cfg.threads = 5;
    cfg.backend = backend;
    cfg.tier_cap = SimdTier::V512;
    cfg.collect_counters = true;
    auto report = run_spmm(a, x, cfg).second;
    REQUIRE(report.counters.has_value());
    CHECK(*report.counters == want);
  }
}

TEST_CASE("report bookkeeping: trials, mean, gflops") {
  CsrMatrix a = identity(32);
  DenseMatrix x = random_dense(32, 8, 4);
  RunConfig cfg;
  cfg.backend = Backend::Interp;
  cfg.threads = 1;
  cfg.trials = 3;
  auto report = run_spmm(a, x, cfg).second;
  REQUIRE(report.times_s.size() == 3);
  double sum = 0;
  for (double t : report.times_s) {
    CHECK(t >= 0.0);
    sum += t;
  }
  CHECK(report.mean_s == doctest::Approx(sum / 3));
  CHECK(report.gflops == doctest::Approx(2.0 * 32 * 8 / report.mean_s / 1e9));
}

TEST_CASE("run_spmm rejects bad configurations") {
  CsrMatrix a = identity(4);
  DenseMatrix x = random_dense(4, 4, 1);
  RunConfig cfg;
  cfg.backend = Backend::Interp;
  cfg.strategy = Strategy::NnzSplit;
  cfg.dynamic_dispatch = true;  // only valid with RowSplit
  CHECK_THROWS_AS(run_spmm(a, x, cfg), std::invalid_argument);
  RunConfig ok;
  ok.backend = Backend::Interp;
  DenseMatrix bad = random_dense(5, 4, 1);
  CHECK_THROWS_AS(run_spmm(a, bad, ok), std::invalid_argument);
}
