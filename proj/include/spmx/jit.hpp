// Native x86-64 backend: lowers a KernelPlan to machine code in an
// executable buffer and exposes it as a callable kernel.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "spmx/plan.hpp"

namespace spmx {

// Flat argument record shared by all strategy drivers. Static drivers
// read row_begin/row_end; the dynamic driver reads counter and m.
struct KernelArgs {
  const uint64_t* row_ptr;
  const uint32_t* col_indices;
  const float* vals;
  const float* x;
  float* y;
  uint64_t row_begin;
  uint64_t row_end;
  uint64_t* counter;  // DispatchCounter storage, null for static drivers
  uint64_t m;
};

class ExecutableKernel {
 public:
  using EntryFn = void (*)(const KernelArgs*);

  ExecutableKernel(const ExecutableKernel&) = delete;
  ExecutableKernel& operator=(const ExecutableKernel&) = delete;
  ExecutableKernel(ExecutableKernel&& o) noexcept;
  ExecutableKernel& operator=(ExecutableKernel&&) = delete;
  ~ExecutableKernel();

  void operator()(const KernelArgs& args) const;

  // Unmaps the code buffer; throws on double release.
  void release();

  SimdTier tier() const { return tier_; }
  size_t code_size() const { return size_; }
  std::vector<uint8_t> code_bytes() const;  // copy, for dump/disassembly

 private:
  friend ExecutableKernel emit(const KernelPlan&);
  ExecutableKernel(void* code, size_t size, SimdTier tier);

  void* code_ = nullptr;
  size_t size_ = 0;    // emitted byte count
  size_t mapped_ = 0;  // page-rounded mapping size
  SimdTier tier_ = SimdTier::Scalar;
};

// Assembles the plan into executable memory (write, then remap R^X).
// Throws when the host lacks the plan's tier or when mapping fails;
// Scalar plans are interpreter-only.
ExecutableKernel emit(const KernelPlan& plan);

// Code bytes without mapping them executable; emit() is this plus W^X
// placement. Deterministic: identical plans give identical bytes.
std::vector<uint8_t> emit_code_bytes(const KernelPlan& plan);

}  // namespace spmx
