#include "spmx/jit.hpp"

#include <sys/mman.h>

#include <bit>
#include <cstring>
#include <stdexcept>

#include "asm_x64.hpp"

namespace spmx {

static_assert(offsetof(KernelArgs, row_ptr) == 0);
static_assert(offsetof(KernelArgs, col_indices) == 8);
static_assert(offsetof(KernelArgs, vals) == 16);
static_assert(offsetof(KernelArgs, x) == 24);
static_assert(offsetof(KernelArgs, y) == 32);
static_assert(offsetof(KernelArgs, row_begin) == 40);
static_assert(offsetof(KernelArgs, row_end) == 48);
static_assert(offsetof(KernelArgs, counter) == 56);
static_assert(offsetof(KernelArgs, m) == 64);

namespace {

using namespace x64;

// Fixed register map inside generated code:
//   rbx row_ptr   r13 col_indices   rcx vals   r8 X   r9 Y
//   rdi current row   rsi row end   r10/r11 nz begin/end   rdx nz cursor
//   r12 column index  rax address scratch  r14 m / r15 counter (dynamic)
void emit_row_address(Assembler& as, const KernelPlan& plan, int row_reg, int base_reg) {
  const int64_t row_bytes = int64_t(plan.d()) * 4;
  if (plan.stride == StrideCode::Shift) {
    as.mov(rax, row_reg);
    as.shl_imm(rax, uint8_t(std::countr_zero(uint64_t(row_bytes))));
  } else {
    as.imul_imm(rax, row_reg, int32_t(row_bytes));
  }
  as.add(rax, base_reg);
}

void emit_row_body(Assembler& as, const KernelPlan& plan) {
  const bool v512 = plan.tier() == SimdTier::V512;
  const int bcast = plan.reg.broadcast_reg;
  for (const Tile& tile : plan.reg.tiles) {
    for (const Chunk& c : tile.chunks) {
      if (c.acc_reg < 16)
        as.vxorps_self(c.acc_reg);
      else
        as.vpxord_self_z(c.acc_reg);
    }
    as.mov(rdx, r10);
    Assembler::Label loop_start = as.new_label();
    Assembler::Label loop_end = as.new_label();
    as.bind(loop_start);
    as.cmp(rdx, r11);
    as.jcc(Cond::jge_u, loop_end);
    as.mov32(r12, Mem{r13, rdx, 4});  // column index
    emit_row_address(as, plan, r12, r8);
    as.vbroadcastss(v512 ? 16 : 8, bcast, Mem{rcx, rdx, 4});
    for (const Chunk& c : tile.chunks)
      as.vfmadd231(c.lanes, c.acc_reg, bcast,
                   Mem{rax, -1, 1, int32_t(tile.col_begin + c.col_offset) * 4});
    as.inc(rdx);
    as.jmp(loop_start);
    as.bind(loop_end);
    emit_row_address(as, plan, rdi, r9);
    for (const Chunk& c : tile.chunks)
      as.vmov_store(c.lanes, Mem{rax, -1, 1, int32_t(tile.col_begin + c.col_offset) * 4},
                    c.acc_reg);
  }
}

// rdi..rsi row loop around the row body.
void emit_row_loop(Assembler& as, const KernelPlan& plan) {
  Assembler::Label loop_start = as.new_label();
  Assembler::Label loop_end = as.new_label();
  as.bind(loop_start);
  as.cmp(rdi, rsi);
  as.jcc(Cond::jge_u, loop_end);
  as.mov(r10, Mem{rbx, rdi, 8});
  as.mov(r11, Mem{rbx, rdi, 8, 8});
  emit_row_body(as, plan);
  as.inc(rdi);
  as.jmp(loop_start);
  as.bind(loop_end);
}

}  // namespace

std::vector<uint8_t> emit_code_bytes(const KernelPlan& plan) {
  if (plan.tier() == SimdTier::Scalar)
    throw std::runtime_error("scalar tier is interpreter-only");
  Assembler as;
  as.push(rbx);
  as.push(r12);
  as.push(r13);
  as.push(r14);
  as.push(r15);
  as.mov(rax, rdi);  // KernelArgs*
  as.mov(rbx, Mem{rax, -1, 1, 0});
  as.mov(r13, Mem{rax, -1, 1, 8});
  as.mov(rcx, Mem{rax, -1, 1, 16});
  as.mov(r8, Mem{rax, -1, 1, 24});
  as.mov(r9, Mem{rax, -1, 1, 32});
  if (plan.dynamic) {
    as.mov(r15, Mem{rax, -1, 1, 56});
    as.mov(r14, Mem{rax, -1, 1, 64});
    Assembler::Label request = as.new_label();
    Assembler::Label done = as.new_label();
    as.bind(request);
    as.mov_imm32(rdi, uint32_t(plan.dynamic->batch_size));  // batch as immediate
    as.lock_xadd(Mem{r15}, rdi);
    as.cmp(rdi, r14);
    as.jcc(Cond::jge_u, done);
    as.lea(rsi, Mem{rdi, -1, 1, int32_t(plan.dynamic->batch_size)});
    as.cmp(rsi, r14);
    as.cmova(rsi, r14);
    emit_row_loop(as, plan);
    as.jmp(request);
    as.bind(done);
  } else {
    as.mov(rdi, Mem{rax, -1, 1, 40});
    as.mov(rsi, Mem{rax, -1, 1, 48});
    emit_row_loop(as, plan);
  }
  as.pop(r15);
  as.pop(r14);
  as.pop(r13);
  as.pop(r12);
  as.pop(rbx);
  as.ret();
  return as.finish();
}

ExecutableKernel emit(const KernelPlan& plan) {
  // refuse to emit for a tier above the host
  detect_tier(plan.tier());
  if (plan.dynamic && plan.dynamic->batch_size > 0x7fffffffu)
    throw std::runtime_error("batch size too large for immediate encoding");
  std::vector<uint8_t> bytes = emit_code_bytes(plan);

  size_t mapped = (bytes.size() + 4095) & ~size_t(4095);
  void* mem = mmap(nullptr, mapped, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS, -1, 0);
  if (mem == MAP_FAILED) throw std::runtime_error("mmap failed for code buffer");
  std::memcpy(mem, bytes.data(), bytes.size());
  if (mprotect(mem, mapped, PROT_READ | PROT_EXEC) != 0) {
    munmap(mem, mapped);
    throw std::runtime_error("mprotect failed to remap code executable");
  }
  ExecutableKernel k(mem, mapped, plan.tier());
  k.size_ = bytes.size();
  return k;
}

ExecutableKernel::ExecutableKernel(void* code, size_t size, SimdTier tier)
    : code_(code), size_(size), mapped_(size), tier_(tier) {}

ExecutableKernel::ExecutableKernel(ExecutableKernel&& o) noexcept
    : code_(o.code_), size_(o.size_), mapped_(o.mapped_), tier_(o.tier_) {
  o.code_ = nullptr;
}

ExecutableKernel::~ExecutableKernel() {
  if (code_) munmap(code_, mapped_);
}

void ExecutableKernel::operator()(const KernelArgs& args) const {
  if (!code_) throw std::logic_error("kernel invoked after release");
  reinterpret_cast<EntryFn>(code_)(&args);
}

void ExecutableKernel::release() {
  if (!code_) throw std::logic_error("double release of kernel");
  munmap(code_, mapped_);
  code_ = nullptr;
}

std::vector<uint8_t> ExecutableKernel::code_bytes() const {
  if (!code_) throw std::logic_error("kernel released");
  const uint8_t* p = static_cast<const uint8_t*>(code_);
  return std::vector<uint8_t>(p, p + size_);
}

}  // namespace spmx
