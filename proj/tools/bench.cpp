// Benchmark/driver CLI: load or synthesize a sparse matrix, run SpMM under
// a chosen workload division and backend, verify against the serial
// reference, and emit JSON or CSV reports.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spmx/dense.hpp"
#include "spmx/executor.hpp"
#include "spmx/interp.hpp"
#include "spmx/jit.hpp"
#include "spmx/mmio.hpp"

using nlohmann::json;
using namespace spmx;

namespace {

struct CliConfig {
  std::string matrix_path;
  int64_t synthetic_rows = 0;
  double synthetic_avg_nnz = 16.0;
  double synthetic_skew = 0.0;
  int cols = 16;
  std::string strategy = "row";
  std::string dispatch = "dynamic";
  unsigned threads = 0;
  std::string backend = "native";
  std::string tier;
  uint64_t batch_size = 128;
  unsigned trials = 1;
  uint64_t seed = 42;
  bool verify = false;
  bool counters = false;
  std::string format = "json";
  std::string report_path;
  bool dump_plan = false;
  std::string dump_code_path;
  std::string save_cache_path;
};

Strategy parse_strategy(const std::string& s) {
  if (s == "row") return Strategy::RowSplit;
  if (s == "nnz") return Strategy::NnzSplit;
  if (s == "merge") return Strategy::MergeSplit;
  throw CLI::ValidationError("--strategy", "unknown strategy: " + s);
}

std::optional<SimdTier> parse_tier(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "avx512") return SimdTier::V512;
  if (s == "avx2") return SimdTier::V256;
  if (s == "scalar") return SimdTier::Scalar;
  throw CLI::ValidationError("--tier", "unknown tier: " + s);
}

CsrMatrix load_input(const CliConfig& cli, std::string& name) {
  if (!cli.matrix_path.empty()) {
    name = cli.matrix_path;
    if (cli.matrix_path.size() > 5 &&
        cli.matrix_path.substr(cli.matrix_path.size() - 5) == ".jspm")
      return load_csr_cache(cli.matrix_path);
    return load_matrix_market(cli.matrix_path);
  }
  if (cli.synthetic_rows > 0) {
    name = "synthetic(" + std::to_string(cli.synthetic_rows) + ")";
    return random_csr(cli.synthetic_rows, cli.synthetic_avg_nnz, cli.synthetic_skew,
                      cli.seed ^ 0x5157a7e5u);
  }
  throw CLI::ValidationError("--matrix", "need --matrix or --synthetic");
}

json counters_json(const ExecCounters& c) {
  return json{{"memory_loads", c.memory_loads}, {"stores", c.stores},
              {"branches", c.branches},         {"vector_arith", c.vector_arith},
              {"scalar_arith", c.scalar_arith}, {"instructions", c.instructions}};
}

json report_json(const std::string& matrix, const CsrMatrix& a, int d, const RunConfig& cfg,
                 const RunReport& rep, uint64_t y_checksum) {
  json j{{"matrix", matrix},
         {"m", a.m},
         {"n", a.n},
         {"nnz", a.nnz},
         {"d", d},
         {"strategy", std::string(strategy_name(cfg.strategy)) +
                          (cfg.dynamic_dispatch ? "+dynamic" : "")},
         {"backend", backend_name(cfg.backend)},
         {"tier", tier_name(rep.tier)},
         {"threads", rep.threads},
         {"batch_size", cfg.batch_size},
         {"trials", cfg.trials},
         {"times_s", rep.times_s},
         {"mean_s", rep.mean_s},
         {"codegen_s", rep.codegen_s},
         {"codegen_pct", rep.mean_s > 0 ? 100.0 * rep.codegen_s / rep.mean_s : 0.0},
         {"gflops", rep.gflops},
         {"y_checksum", y_checksum}};
  if (rep.counters) j["counters"] = counters_json(*rep.counters);
  if (rep.max_rel_err) j["max_rel_err"] = *rep.max_rel_err;
  return j;
}

const char* kCsvHeader =
    "matrix,m,n,nnz,d,strategy,backend,tier,threads,batch_size,trials,times_s,"
    "mean_s,codegen_s,codegen_pct,gflops,memory_loads,stores,branches,"
    "vector_arith,scalar_arith,instructions,y_checksum,max_rel_err,status\n";

std::string csv_row(const json& j) {
  std::string times;
  if (j.contains("times_s"))
    for (double t : j["times_s"]) times += (times.empty() ? "" : ";") + std::to_string(t);
  auto num = [&](const char* key, const char* sub = nullptr) -> std::string {
    if (!j.contains(key)) return "";
    const json& v = sub ? j[key][sub] : j[key];
    return v.dump();
  };
  std::string row;
  row += j.value("matrix", "") + ",";
  row += num("m") + "," + num("n") + "," + num("nnz") + "," + num("d") + ",";
  row += j.value("strategy", "") + "," + j.value("backend", "") + ",";
  row += j.value("tier", "") + "," + num("threads") + "," + num("batch_size") + ",";
  row += num("trials") + "," + times + "," + num("mean_s") + "," + num("codegen_s") + ",";
  row += num("codegen_pct") + "," + num("gflops") + ",";
  if (j.contains("counters"))
    row += num("counters", "memory_loads") + "," + num("counters", "stores") + "," +
           num("counters", "branches") + "," + num("counters", "vector_arith") + "," +
           num("counters", "scalar_arith") + "," + num("counters", "instructions") + ",";
  else
    row += ",,,,,,";
  row += num("y_checksum") + "," + num("max_rel_err") + ",";
  row += j.value("status", "ok");
  return row + "\n";
}

void write_report(const CliConfig& cli, const std::string& text) {
  if (cli.report_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cli.report_path);
  if (!out) throw std::runtime_error("cannot write report: " + cli.report_path);
  out << text;
}

RunConfig make_run_config(const CliConfig& cli) {
  RunConfig cfg;
  cfg.strategy = parse_strategy(cli.strategy);
  if (cli.dispatch != "static" && cli.dispatch != "dynamic")
    throw CLI::ValidationError("--dispatch", "expected static or dynamic");
  cfg.dynamic_dispatch = cli.dispatch == "dynamic" && cfg.strategy == Strategy::RowSplit;
  cfg.threads = cli.threads;
  if (cli.backend == "native")
    cfg.backend = Backend::Native;
  else if (cli.backend == "interp")
    cfg.backend = Backend::Interp;
  else
    throw CLI::ValidationError("--backend", "unknown backend: " + cli.backend);
  cfg.tier_cap = parse_tier(cli.tier);
  cfg.batch_size = cli.batch_size;
  cfg.verify = cli.verify;
  cfg.trials = cli.trials;
  cfg.collect_counters = cli.counters;
  return cfg;
}

int run_single(const CliConfig& cli) {
  std::string name;
  CsrMatrix a = load_input(cli, name);
  if (!cli.save_cache_path.empty()) save_csr_cache(a, cli.save_cache_path);
  DenseMatrix x = random_dense(a.n > 0 ? a.n : 1, cli.cols, cli.seed);
  if (a.n == 0) x.rows = 0;  // degenerate empty matrix still runs

  RunConfig cfg = make_run_config(cli);
  if (cli.dump_plan || !cli.dump_code_path.empty()) {
    SimdTier tier = cfg.backend == Backend::Native ? detect_tier(cfg.tier_cap)
                                                   : cfg.tier_cap.value_or(detect_tier());
    KernelPlan plan = build_kernel(cli.cols, tier, cfg.strategy,
                                   cfg.dynamic_dispatch
                                       ? std::optional<DispatchConfig>{{cfg.batch_size}}
                                       : std::nullopt);
    if (cli.dump_plan) std::cerr << dump_plan(plan);
    if (!cli.dump_code_path.empty()) {
      auto bytes = emit_code_bytes(plan);
      std::ofstream out(cli.dump_code_path, std::ios::binary);
      out.write(reinterpret_cast<const char*>(bytes.data()), long(bytes.size()));
    }
  }

  auto [y, rep] = run_spmm(a, x, cfg);
  json j = report_json(name, a, cli.cols, cfg, rep, checksum(y));
  write_report(cli, cli.format == "csv" ? std::string(kCsvHeader) + csv_row(j)
                                        : j.dump(2) + "\n");
  if (rep.max_rel_err && *rep.max_rel_err > kVerifyTolerance) {
    std::cerr << "verification FAILED: max_rel_err = " << *rep.max_rel_err << "\n";
    return 2;
  }
  return 0;
}

int run_sweep(const CliConfig& cli, const std::vector<int>& d_list,
              const std::vector<std::string>& strategies,
              const std::vector<std::string>& backends) {
  std::string name;
  CsrMatrix a = load_input(cli, name);
  json rows = json::array();
  for (const std::string& strat : strategies) {
    for (int d : d_list) {
      for (const std::string& backend : backends) {
        CliConfig cell = cli;
        cell.strategy = strat;
        cell.cols = d;
        cell.backend = backend;
        RunConfig cfg = make_run_config(cell);
        DenseMatrix x = random_dense(a.n > 0 ? a.n : 1, d, cli.seed);
        if (a.n == 0) x.rows = 0;
        try {
          auto [y, rep] = run_spmm(a, x, cfg);
          json j = report_json(name, a, d, cfg, rep, checksum(y));
          j["status"] = "ok";
          rows.push_back(std::move(j));
        } catch (const std::exception& e) {
          rows.push_back(json{{"matrix", name},
                              {"d", d},
                              {"strategy", strat},
                              {"backend", backend},
                              {"status", std::string("skipped: ") + e.what()}});
        }
      }
    }
  }
  if (cli.format == "csv") {
    std::string text = kCsvHeader;
    for (const auto& row : rows) text += csv_row(row);
    write_report(cli, text);
  } else {
    write_report(cli, rows.dump(2) + "\n");
  }
  for (const auto& row : rows)
    if (row.contains("max_rel_err") && double(row["max_rel_err"]) > kVerifyTolerance)
      return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CliConfig cli;
  CLI::App app{"runtime-specialized sparse x dense matrix multiplication benchmark"};

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--matrix", cli.matrix_path, "Matrix Market file (or .jspm cache)");
    cmd->add_option("--synthetic", cli.synthetic_rows, "generate a square synthetic matrix");
    cmd->add_option("--avg-nnz", cli.synthetic_avg_nnz, "synthetic: average nnz per row");
    cmd->add_option("--skew", cli.synthetic_skew, "synthetic: row-length skew (0 = uniform)");
    cmd->add_option("--threads", cli.threads, "worker threads (0 = logical cores)");
    cmd->add_option("--tier", cli.tier, "SIMD tier cap: avx512|avx2|scalar");
    cmd->add_option("--batch-size", cli.batch_size, "dynamic dispatch batch size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--trials", cli.trials, "timed repetitions")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cli.seed, "PRNG seed for the dense operand");
    cmd->add_flag("--verify", cli.verify, "compare against the serial reference");
    cmd->add_flag("--counters", cli.counters, "report virtual-op counters");
    cmd->add_option("--format", cli.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--report", cli.report_path, "write report to file instead of stdout");
  };

  add_common(&app);
  app.add_option("--cols", cli.cols, "dense operand width d")->check(CLI::PositiveNumber);
  app.add_option("--strategy", cli.strategy, "row|nnz|merge");
  app.add_option("--dispatch", cli.dispatch, "static|dynamic (row strategy only)");
  app.add_option("--backend", cli.backend, "native|interp");
  app.add_flag("--dump-plan", cli.dump_plan, "print the virtual-instruction program");
  app.add_option("--dump-code", cli.dump_code_path, "write emitted machine code bytes");
  app.add_option("--save-cache", cli.save_cache_path, "write the matrix as a .jspm cache");

  std::vector<int> d_list{16, 32};
  std::vector<std::string> strategies{"row", "nnz", "merge"};
  std::vector<std::string> backends{"native", "interp"};
  CLI::App* sweep = app.add_subcommand("sweep", "run a strategy x d x backend grid");
  add_common(sweep);
  sweep->add_option("--d-list", d_list, "dense widths to sweep");
  sweep->add_option("--strategies", strategies, "strategies to sweep");
  sweep->add_option("--backends", backends, "backends to sweep");
  sweep->add_option("--dispatch", cli.dispatch, "static|dynamic (row strategy only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 1;
  }

  try {
    if (sweep->parsed()) return run_sweep(cli, d_list, strategies, backends);
    return run_single(cli);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
