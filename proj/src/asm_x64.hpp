// Minimal x86-64 encoder covering the instruction mix the kernel emitter
// needs: GP moves/arithmetic, branches with label fixups, lock xadd, and
// VEX/EVEX forms of vxorps/vpxord, vbroadcastss, vfmadd231ps/ss and
// vmovups/vmovss stores.
#pragma once

#include <cstdint>
#include <vector>

namespace spmx::x64 {

enum Gp : int {
  rax = 0, rcx = 1, rdx = 2, rbx = 3, rsp = 4, rbp = 5, rsi = 6, rdi = 7,
  r8 = 8, r9 = 9, r10 = 10, r11 = 11, r12 = 12, r13 = 13, r14 = 14, r15 = 15,
};

// [base + index*scale + disp]; index < 0 means no index.
struct Mem {
  int base;
  int index = -1;
  int scale = 1;  // 1, 2, 4, 8
  int32_t disp = 0;
};

enum class Cond { jge, jl, jge_u, jb };  // signed ge/lt, unsigned ge/lt

class Assembler {
 public:
  using Label = int;

  Label new_label();
  void bind(Label l);

  void push(int r);
  void pop(int r);
  void ret();

  void mov(int dst, int src);            // r64, r64
  void mov(int dst, const Mem& src);     // r64 <- m64
  void mov32(int dst, const Mem& src);   // r32 <- m32 (zero-extends)
  void mov_imm32(int dst, uint32_t v);   // r32 <- imm32 (zero-extends)
  void lea(int dst, const Mem& src);
  void add(int dst, int src);
  void inc(int r);
  void imul_imm(int dst, int src, int32_t imm);
  void shl_imm(int r, uint8_t count);
  void cmp(int lhs, int rhs);
  void cmova(int dst, int src);
  void lock_xadd(const Mem& dst, int src);

  void jmp(Label l);
  void jcc(Cond c, Label l);

  // Vector ops. `lanes` is 16/8/4 for packed forms, 1 for scalar forms.
  // Registers 0-15 encode as VEX where possible; 16-31 require EVEX.
  void vxorps_self(int reg);                                // zero, VEX.128
  void vpxord_self_z(int reg);                              // zero, EVEX.512
  void vbroadcastss(int lanes, int dst, const Mem& src);
  void vfmadd231(int lanes, int acc, int bcast, const Mem& src);
  void vmov_store(int lanes, const Mem& dst, int src);

  // Resolves all label fixups and returns the code bytes.
  std::vector<uint8_t> finish();

 private:
  void byte(uint8_t b) { buf_.push_back(b); }
  void dword(int32_t v);
  void rex(bool w, int reg, int index, int base);
  void modrm_mem(int reg_field, const Mem& m, int disp_shift = 0);
  void vex(int mmmmm, int pp, int w, int l, int reg, int vvvv, const Mem& m);
  void vex_rr(int mmmmm, int pp, int w, int l, int reg, int vvvv, int rm);
  void evex(int mm, int pp, int w, int ll, int reg, int vvvv, const Mem& m, int disp_n);
  void evex_rr(int mm, int pp, int w, int ll, int reg, int vvvv, int rm);

  std::vector<uint8_t> buf_;
  std::vector<int32_t> labels_;                   // bound offsets, -1 if pending
  std::vector<std::pair<size_t, int>> fixups_;    // rel32 site -> label
};

}  // namespace spmx::x64
