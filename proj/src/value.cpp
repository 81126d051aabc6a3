#include "pybmc/value.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace pybmc {

std::string Sort::to_string() const {
  switch (kind) {
    case Kind::Bool: return "Bool";
    case Kind::BitVec: return "BitVec(" + std::to_string(width) + ")";
    case Kind::Float: return "FP64";
  }
  return "?";
}

Value Value::boolean(bool v) {
  Value out;
  out.sort = Sort::boolean();
  out.b = v;
  return out;
}

Value Value::bitvec(unsigned width, const u256& bits) {
  Value out;
  out.sort = Sort::bitvec(width);
  out.bits = bv::truncate(bits, width);
  return out;
}

Value Value::from_integer(unsigned width, const cpp_int& v) {
  cpp_int modulus = cpp_int(1) << width;
  cpp_int r = v % modulus;
  if (r < 0) r += modulus;
  return bitvec(width, r.convert_to<u256>());
}

Value Value::fp(double v) {
  Value out;
  out.sort = Sort::fp64();
  out.f = v;
  return out;
}

cpp_int Value::as_unsigned() const { return cpp_int(bits); }

cpp_int Value::as_signed() const {
  cpp_int u(bits);
  if (bv::msb(bits, sort.width)) u -= cpp_int(1) << sort.width;
  return u;
}

bool Value::operator==(const Value& other) const {
  if (!(sort == other.sort)) return false;
  switch (sort.kind) {
    case Sort::Kind::Bool: return b == other.b;
    case Sort::Kind::BitVec: return bits == other.bits;
    case Sort::Kind::Float:
      // Bitwise identity, so NaN equals itself here (unlike fp.eq).
      return std::memcmp(&f, &other.f, sizeof f) == 0;
  }
  return false;
}

namespace bv {

u256 mask(unsigned width) { return width >= 256 ? ~u256(0) : (u256(1) << width) - 1; }

u256 truncate(const u256& v, unsigned width) { return v & mask(width); }

bool msb(const u256& v, unsigned width) { return width > 0 && bit_test(v, width - 1); }

u256 add(const u256& a, const u256& b, unsigned w) { return truncate(a + b, w); }
u256 sub(const u256& a, const u256& b, unsigned w) { return truncate(a - b, w); }
u256 mul(const u256& a, const u256& b, unsigned w) { return truncate(a * b, w); }
u256 neg(const u256& a, unsigned w) { return truncate(~a + 1, w); }

u256 udiv(const u256& a, const u256& b, unsigned w) { return b == 0 ? mask(w) : a / b; }
u256 urem(const u256& a, const u256& b, unsigned w) {
  (void)w;
  return b == 0 ? a : a % b;
}

u256 sdiv(const u256& a, const u256& b, unsigned w) {
  const bool na = msb(a, w), nb = msb(b, w);
  if (!na && !nb) return udiv(a, b, w);
  if (na && !nb) return neg(udiv(neg(a, w), b, w), w);
  if (!na && nb) return neg(udiv(a, neg(b, w), w), w);
  return udiv(neg(a, w), neg(b, w), w);
}

u256 srem(const u256& a, const u256& b, unsigned w) {
  const bool na = msb(a, w), nb = msb(b, w);
  if (!na && !nb) return urem(a, b, w);
  if (na && !nb) return neg(urem(neg(a, w), b, w), w);
  if (!na && nb) return urem(a, neg(b, w), w);
  return neg(urem(neg(a, w), neg(b, w), w), w);
}

u256 floordiv(const u256& a, const u256& b, unsigned w) {
  u256 q = sdiv(a, b, w);
  u256 r = srem(a, b, w);
  if (r != 0 && msb(r, w) != msb(b, w)) return sub(q, 1, w);
  return q;
}

u256 floormod(const u256& a, const u256& b, unsigned w) {
  u256 r = srem(a, b, w);
  if (r != 0 && msb(r, w) != msb(b, w)) return add(r, b, w);
  return r;
}

u256 shl(const u256& a, const u256& b, unsigned w) {
  if (b >= w) return 0;
  return truncate(a << static_cast<unsigned>(b), w);
}

u256 lshr(const u256& a, const u256& b, unsigned w) {
  if (b >= w) return 0;
  return a >> static_cast<unsigned>(b);
}

u256 ashr(const u256& a, const u256& b, unsigned w) {
  if (!msb(a, w)) return lshr(a, b, w);
  if (b >= w) return mask(w);
  unsigned s = static_cast<unsigned>(b);
  u256 shifted = a >> s;
  u256 fill = mask(w) & ~(mask(w) >> s);
  return shifted | fill;
}

bool slt(const u256& a, const u256& b, unsigned w) {
  const bool na = msb(a, w), nb = msb(b, w);
  if (na != nb) return na;
  return a < b;
}

bool sle(const u256& a, const u256& b, unsigned w) { return a == b || slt(a, b, w); }

u256 sign_extend(const u256& a, unsigned from, unsigned to) {
  if (!msb(a, from)) return a;
  return truncate(a | (mask(to) & ~mask(from)), to);
}

}  // namespace bv

std::string format_decimal(const Value& v, bool is_signed) {
  switch (v.sort.kind) {
    case Sort::Kind::Bool: return v.b ? "True" : "False";
    case Sort::Kind::Float: return format_float(v.f);
    case Sort::Kind::BitVec: return (is_signed ? v.as_signed() : v.as_unsigned()).str();
  }
  return "?";
}

std::string format_binary(const Value& v) {
  std::string out;
  switch (v.sort.kind) {
    case Sort::Kind::Bool:
      return v.b ? "1" : "0";
    case Sort::Kind::BitVec:
      for (unsigned i = v.sort.width; i-- > 0;) {
        out += bit_test(v.bits, i) ? '1' : '0';
        if (i % 8 == 0 && i != 0) out += ' ';
      }
      return out;
    case Sort::Kind::Float: {
      std::uint64_t raw;
      std::memcpy(&raw, &v.f, sizeof raw);
      for (unsigned i = 64; i-- > 0;) {
        out += (raw >> i) & 1 ? '1' : '0';
        if (i % 8 == 0 && i != 0) out += ' ';
      }
      return out;
    }
  }
  return out;
}

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest representation that reads back to the same double.
  char buffer[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, v);
    if (std::strtod(buffer, nullptr) == v) break;
  }
  std::string s = buffer;
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

}  // namespace pybmc
