#include "asm_x64.hpp"

#include <cassert>
#include <stdexcept>

namespace spmx::x64 {

void Assembler::dword(int32_t v) {
  byte(uint8_t(v));
  byte(uint8_t(v >> 8));
  byte(uint8_t(v >> 16));
  byte(uint8_t(v >> 24));
}

Assembler::Label Assembler::new_label() {
  labels_.push_back(-1);
  return int(labels_.size()) - 1;
}

void Assembler::bind(Label l) {
  assert(labels_[l] == -1);
  labels_[l] = int32_t(buf_.size());
}

void Assembler::rex(bool w, int reg, int index, int base) {
  uint8_t b = 0x40;
  if (w) b |= 0x08;
  if (reg >= 8) b |= 0x04;
  if (index >= 8) b |= 0x02;
  if (base >= 8) b |= 0x01;
  if (b != 0x40 || w) byte(b);
}

void Assembler::modrm_mem(int reg_field, const Mem& m, int disp_shift) {
  const int disp_n = disp_shift;  // byte granule for compressed disp8 (1 = none)
  const int basel = m.base & 7;
  const bool need_sib = m.index >= 0 || basel == 4;
  int mod;
  int8_t disp8 = 0;
  if (m.disp == 0 && basel != 5) {
    mod = 0;
  } else if (m.disp % disp_n == 0 && m.disp / disp_n >= -128 && m.disp / disp_n <= 127) {
    mod = 1;
    disp8 = int8_t(m.disp / disp_n);
  } else {
    mod = 2;
  }
  const int rm = need_sib ? 4 : basel;
  byte(uint8_t(mod << 6 | (reg_field & 7) << 3 | rm));
  if (need_sib) {
    int ss = m.scale == 8 ? 3 : m.scale == 4 ? 2 : m.scale == 2 ? 1 : 0;
    int indexl = m.index >= 0 ? (m.index & 7) : 4;
    byte(uint8_t(ss << 6 | indexl << 3 | basel));
  }
  if (mod == 1)
    byte(uint8_t(disp8));
  else if (mod == 2)
    dword(m.disp);
}

void Assembler::push(int r) {
  if (r >= 8) byte(0x41);
  byte(uint8_t(0x50 + (r & 7)));
}

void Assembler::pop(int r) {
  if (r >= 8) byte(0x41);
  byte(uint8_t(0x58 + (r & 7)));
}

void Assembler::ret() { byte(0xC3); }

void Assembler::mov(int dst, int src) {
  rex(true, dst, -1, src);
  byte(0x8B);
  byte(uint8_t(0xC0 | (dst & 7) << 3 | (src & 7)));
}

void Assembler::mov(int dst, const Mem& src) {
  rex(true, dst, src.index, src.base);
  byte(0x8B);
  modrm_mem(dst, src, 1);
}

void Assembler::mov32(int dst, const Mem& src) {
  rex(false, dst, src.index, src.base);
  byte(0x8B);
  modrm_mem(dst, src, 1);
}

void Assembler::mov_imm32(int dst, uint32_t v) {
  if (dst >= 8) byte(0x41);
  byte(uint8_t(0xB8 + (dst & 7)));
  dword(int32_t(v));
}

void Assembler::lea(int dst, const Mem& src) {
  rex(true, dst, src.index, src.base);
  byte(0x8D);
  modrm_mem(dst, src, 1);
}

void Assembler::add(int dst, int src) {
  rex(true, src, -1, dst);
  byte(0x01);
  byte(uint8_t(0xC0 | (src & 7) << 3 | (dst & 7)));
}

void Assembler::inc(int r) {
  rex(true, 0, -1, r);
  byte(0xFF);
  byte(uint8_t(0xC0 | (r & 7)));
}

void Assembler::imul_imm(int dst, int src, int32_t imm) {
  rex(true, dst, -1, src);
  byte(0x69);
  byte(uint8_t(0xC0 | (dst & 7) << 3 | (src & 7)));
  dword(imm);
}

void Assembler::shl_imm(int r, uint8_t count) {
  rex(true, 4, -1, r);
  byte(0xC1);
  byte(uint8_t(0xC0 | 4 << 3 | (r & 7)));
  byte(count);
}

void Assembler::cmp(int lhs, int rhs) {
  rex(true, rhs, -1, lhs);
  byte(0x39);
  byte(uint8_t(0xC0 | (rhs & 7) << 3 | (lhs & 7)));
}

void Assembler::cmova(int dst, int src) {
  rex(true, dst, -1, src);
  byte(0x0F);
  byte(0x47);
  byte(uint8_t(0xC0 | (dst & 7) << 3 | (src & 7)));
}

void Assembler::lock_xadd(const Mem& dst, int src) {
  byte(0xF0);
  rex(true, src, dst.index, dst.base);
  byte(0x0F);
  byte(0xC1);
  modrm_mem(src, dst, 1);
}

void Assembler::jmp(Label l) {
  byte(0xE9);
  fixups_.emplace_back(buf_.size(), l);
  dword(0);
}

void Assembler::jcc(Cond c, Label l) {
  byte(0x0F);
  switch (c) {
    case Cond::jge: byte(0x8D); break;
    case Cond::jl: byte(0x8C); break;
    case Cond::jge_u: byte(0x83); break;
    case Cond::jb: byte(0x82); break;
  }
  fixups_.emplace_back(buf_.size(), l);
  dword(0);
}

void Assembler::vex(int mmmmm, int pp, int w, int l, int reg, int vvvv, const Mem& m) {
  assert(reg < 16 && vvvv < 16);
  int x = m.index >= 0 ? (m.index >> 3) & 1 : 0;
  int b = (m.base >> 3) & 1;
  byte(0xC4);
  byte(uint8_t((~(reg >> 3) & 1) << 7 | (~x & 1) << 6 | (~b & 1) << 5 | mmmmm));
  byte(uint8_t(w << 7 | (~vvvv & 0xF) << 3 | l << 2 | pp));
}

void Assembler::vex_rr(int mmmmm, int pp, int w, int l, int reg, int vvvv, int rm) {
  assert(reg < 16 && vvvv < 16 && rm < 16);
  byte(0xC4);
  byte(uint8_t((~(reg >> 3) & 1) << 7 | 1 << 6 | (~(rm >> 3) & 1) << 5 | mmmmm));
  byte(uint8_t(w << 7 | (~vvvv & 0xF) << 3 | l << 2 | pp));
}

void Assembler::evex(int mm, int pp, int w, int ll, int reg, int vvvv, const Mem& m,
                     int disp_n) {
  int x = m.index >= 0 ? (m.index >> 3) & 1 : 0;
  int b = (m.base >> 3) & 1;
  byte(0x62);
  byte(uint8_t((~(reg >> 3) & 1) << 7 | (~x & 1) << 6 | (~b & 1) << 5 |
               (~(reg >> 4) & 1) << 4 | mm));
  byte(uint8_t(w << 7 | (~vvvv & 0xF) << 3 | 1 << 2 | pp));
  byte(uint8_t(ll << 5 | (~(vvvv >> 4) & 1) << 3));
  (void)disp_n;
}

void Assembler::evex_rr(int mm, int pp, int w, int ll, int reg, int vvvv, int rm) {
  byte(0x62);
  byte(uint8_t((~(reg >> 3) & 1) << 7 | (~(rm >> 4) & 1) << 6 | (~(rm >> 3) & 1) << 5 |
               (~(reg >> 4) & 1) << 4 | mm));
  byte(uint8_t(w << 7 | (~vvvv & 0xF) << 3 | 1 << 2 | pp));
  byte(uint8_t(ll << 5 | (~(vvvv >> 4) & 1) << 3));
}

void Assembler::vxorps_self(int reg) {
  assert(reg < 16);
  vex_rr(1, 0, 0, 0, reg, reg, reg);
  byte(0x57);
  byte(uint8_t(0xC0 | (reg & 7) << 3 | (reg & 7)));
}

void Assembler::vpxord_self_z(int reg) {
  evex_rr(1, 1, 0, 2, reg, reg, reg);
  byte(0xEF);
  byte(uint8_t(0xC0 | (reg & 7) << 3 | (reg & 7)));
}

namespace {
int ll_for(int lanes) { return lanes == 16 ? 2 : lanes == 8 ? 1 : 0; }
int full_n(int lanes) { return lanes * 4; }  // FullMem tuple granule
}  // namespace

void Assembler::vbroadcastss(int lanes, int dst, const Mem& src) {
  if (dst < 16 && lanes < 16) {
    vex(2, 1, 0, lanes == 8 ? 1 : 0, dst, 0, src);
    byte(0x18);
    modrm_mem(dst, src, 1);
  } else {
    evex(2, 1, 0, ll_for(lanes), dst, 0, src, 4);
    byte(0x18);
    modrm_mem(dst, src, 4);  // T1S: disp8 in 4-byte units
  }
}

void Assembler::vfmadd231(int lanes, int acc, int bcast, const Mem& src) {
  const uint8_t op = lanes == 1 ? 0xB9 : 0xB8;
  if (acc < 16 && bcast < 16 && lanes < 16) {
    vex(2, 1, 0, lanes == 8 ? 1 : 0, acc, bcast, src);
    byte(op);
    modrm_mem(acc, src, 1);
  } else {
    const int n = lanes == 1 ? 4 : full_n(lanes);
    evex(2, 1, 0, ll_for(lanes), acc, bcast, src, n);
    byte(op);
    modrm_mem(acc, src, n);
  }
}

void Assembler::vmov_store(int lanes, const Mem& dst, int src) {
  const int pp = lanes == 1 ? 2 : 0;  // F3 for vmovss
  if (src < 16 && lanes < 16) {
    vex(1, pp, 0, lanes == 8 ? 1 : 0, src, 0, dst);
    byte(0x11);
    modrm_mem(src, dst, 1);
  } else {
    const int n = lanes == 1 ? 4 : full_n(lanes);
    evex(1, pp, 0, ll_for(lanes), src, 0, dst, n);
    byte(0x11);
    modrm_mem(src, dst, n);
  }
}

std::vector<uint8_t> Assembler::finish() {
  for (auto [site, label] : fixups_) {
    int32_t target = labels_[label];
    if (target < 0) throw std::logic_error("unbound label");
    int32_t rel = target - int32_t(site) - 4;
    buf_[site + 0] = uint8_t(rel);
    buf_[site + 1] = uint8_t(rel >> 8);
    buf_[site + 2] = uint8_t(rel >> 16);
    buf_[site + 3] = uint8_t(rel >> 24);
  }
  fixups_.clear();
  return std::move(buf_);
}

}  // namespace spmx::x64
