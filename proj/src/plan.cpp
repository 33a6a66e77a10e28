#include "spmx/plan.hpp"

#include <sstream>
#include <stdexcept>

namespace spmx {

const char* tier_name(SimdTier t) {
  switch (t) {
    case SimdTier::V512: return "avx512";
    case SimdTier::V256: return "avx2";
    case SimdTier::Scalar: return "scalar";
  }
  return "?";
}

SimdTier detect_tier(std::optional<SimdTier> requested) {
#if defined(__x86_64__)
  bool v512 = __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512vl");
  bool v256 = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  bool v512 = false, v256 = false;
#endif
  SimdTier host = v512 ? SimdTier::V512 : v256 ? SimdTier::V256 : SimdTier::Scalar;
  if (!requested) return host;
  if (*requested == SimdTier::V512 && host != SimdTier::V512)
    throw std::runtime_error(__builtin_cpu_supports("avx512f")
                                 ? "AVX-512VL unavailable"
                                 : "AVX-512F unavailable");
  if (*requested == SimdTier::V256 && host == SimdTier::Scalar)
    throw std::runtime_error(__builtin_cpu_supports("avx2") ? "FMA3 unavailable"
                                                            : "AVX2 unavailable");
  return *requested;
}

int RegisterPlan::total_chunks() const {
  int c = 0;
  for (const auto& t : tiles) c += int(t.chunks.size());
  return c;
}

RegisterPlan plan_registers(int d, SimdTier tier) {
  if (d < 1) throw std::invalid_argument("plan_registers: d must be >= 1");
  static constexpr int kLanes512[] = {16, 8, 4, 1};
  static constexpr int kLanes256[] = {8, 4, 1};
  static constexpr int kLanes1[] = {1};
  const int* sizes;
  int nsizes;
  switch (tier) {
    case SimdTier::V512: sizes = kLanes512; nsizes = 4; break;
    case SimdTier::V256: sizes = kLanes256; nsizes = 3; break;
    default: sizes = kLanes1; nsizes = 1; break;
  }
  const int budget = accumulator_budget(tier);

  RegisterPlan plan;
  plan.d = d;
  plan.tier = tier;
  plan.broadcast_reg = broadcast_register(tier);

  int col = 0;
  while (col < d) {
    Tile tile;
    tile.col_begin = col;
    int reg = 0;
    while (col < d && reg < budget) {
      int remaining = d - col;
      int pick = 1;
      for (int s = 0; s < nsizes; ++s)
        if (sizes[s] <= remaining) { pick = sizes[s]; break; }
      tile.chunks.push_back({pick, col - tile.col_begin, reg++});
      col += pick;
    }
    tile.col_end = col;
    plan.tiles.push_back(std::move(tile));
  }
  return plan;
}

KernelPlan build_kernel(int d, SimdTier tier, Strategy strategy,
                        std::optional<DispatchConfig> dynamic) {
  if (dynamic && strategy != Strategy::RowSplit)
    throw std::invalid_argument("dynamic dispatch pairs with row-split only");
  if (dynamic && dynamic->batch_size == 0)
    throw std::invalid_argument("batch_size must be >= 1");
  KernelPlan plan;
  plan.reg = plan_registers(d, tier);
  plan.strategy = strategy;
  plan.dynamic = dynamic;
  uint64_t row_bytes = uint64_t(d) * 4;
  plan.stride = (row_bytes & (row_bytes - 1)) == 0 ? StrideCode::Shift : StrideCode::Multiply;
  return plan;
}

std::string dump_plan(const KernelPlan& plan) {
  std::ostringstream os;
  os << "; tier=" << tier_name(plan.tier()) << " d=" << plan.d()
     << " tiles=" << plan.reg.tiles.size()
     << " stride=" << (plan.stride == StrideCode::Shift ? "shift" : "mul")
     << " strategy=" << strategy_name(plan.strategy);
  if (plan.dynamic) os << " dynamic batch=" << plan.dynamic->batch_size;
  os << "\n";
  if (plan.dynamic)
    os << "batch_loop:  ; lock xadd claim, exit when past m\n";
  os << "row_loop:\n";
  os << "  load.range r10=row_ptr[row] r11=row_ptr[row+1]\n";
  for (size_t t = 0; t < plan.reg.tiles.size(); ++t) {
    const Tile& tile = plan.reg.tiles[t];
    os << "  tile " << t << " cols [" << tile.col_begin << "," << tile.col_end << ")\n";
    for (const Chunk& c : tile.chunks)
      os << "    zero v" << c.acc_reg << "." << c.lanes << "\n";
    os << "    nnz_loop:\n";
    os << "      load.idx  k = col_indices[cur]\n";
    os << "      load.bcast v" << plan.reg.broadcast_reg << " = vals[cur]\n";
    for (const Chunk& c : tile.chunks)
      os << "      fma" << (c.lanes > 1 ? ".p" : ".s") << " v" << c.acc_reg << "."
         << c.lanes << " += v" << plan.reg.broadcast_reg << " * x[k]["
         << tile.col_begin + c.col_offset << ":" << tile.col_begin + c.col_offset + c.lanes
         << "]\n";
    os << "    end_nnz_loop\n";
    for (const Chunk& c : tile.chunks)
      os << "    store y[row][" << tile.col_begin + c.col_offset << ":"
         << tile.col_begin + c.col_offset + c.lanes << "] = v" << c.acc_reg << "."
         << c.lanes << "\n";
  }
  os << "end_row_loop\n";
  if (plan.dynamic) os << "end_batch_loop\n";
  return os.str();
}

}  // namespace spmx
