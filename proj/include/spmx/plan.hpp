// SIMD tier detection and register/kernel planning for the column-merged
// row kernel: decompose d into lane-sized accumulator chunks, tiling the
// columns when d exceeds the accumulator budget.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spmx/partition.hpp"

namespace spmx {

enum class SimdTier { Scalar, V256, V512 };

constexpr int lanes(SimdTier t) {
  return t == SimdTier::V512 ? 16 : t == SimdTier::V256 ? 8 : 1;
}

// Accumulators available per tile. V512 reserves register 31 for the
// broadcast value and 30 as scratch; V256 reserves register 15.
constexpr int accumulator_budget(SimdTier t) {
  return t == SimdTier::V256 ? 14 : 30;
}

constexpr int broadcast_register(SimdTier t) {
  return t == SimdTier::V256 ? 15 : 31;
}

const char* tier_name(SimdTier t);

// Highest tier the host supports (V512 needs AVX-512F+VL, V256 needs
// AVX2+FMA3), capped by `requested`. Throws, naming the missing feature
// flag, when the requested tier exceeds the host.
SimdTier detect_tier(std::optional<SimdTier> requested = std::nullopt);

struct Chunk {
  int lanes = 0;       // 16, 8, 4 or 1
  int col_offset = 0;  // starting column within the tile
  int acc_reg = 0;     // virtual accumulator register id
};

struct Tile {
  int col_begin = 0;
  int col_end = 0;
  std::vector<Chunk> chunks;
};

struct RegisterPlan {
  int d = 0;
  SimdTier tier = SimdTier::Scalar;
  std::vector<Tile> tiles;
  int broadcast_reg = 0;

  int total_chunks() const;
};

// Greedy largest-first decomposition of d over the tier's lane sizes
// (V512: 16/8/4/1, V256: 8/4/1, Scalar: 1); a new tile starts whenever
// the chunk count would exceed the accumulator budget. Throws on d == 0.
RegisterPlan plan_registers(int d, SimdTier tier);

enum class StrideCode { Shift, Multiply };

struct KernelPlan {
  RegisterPlan reg;
  Strategy strategy = Strategy::RowSplit;
  std::optional<DispatchConfig> dynamic;  // RowSplit only
  StrideCode stride = StrideCode::Multiply;

  int d() const { return reg.d; }
  SimdTier tier() const { return reg.tier; }
};

// Row kernel wrapped in the strategy driver: a batch-request loop under
// dynamic dispatch, otherwise a loop over the assigned row range. The
// X/Y row offset is a shift when d*4 is a power of two.
KernelPlan build_kernel(int d, SimdTier tier, Strategy strategy,
                        std::optional<DispatchConfig> dynamic = std::nullopt);

// One virtual instruction per line, for golden tests and debugging.
std::string dump_plan(const KernelPlan& plan);

}  // namespace spmx
