#pragma once

// Concrete values of the three formula sorts, with operations that follow the
// SMT-LIB definitions bit for bit (including the results of division by
// zero), so concrete evaluation agrees with any conforming solver.

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace pybmc {

using u256 = boost::multiprecision::uint256_t;
using boost::multiprecision::cpp_int;

struct Sort {
  enum class Kind { Bool, BitVec, Float };
  Kind kind = Kind::Bool;
  unsigned width = 0;  // bit-vectors only

  static Sort boolean() { return {Kind::Bool, 0}; }
  static Sort bitvec(unsigned w) { return {Kind::BitVec, w}; }
  static Sort fp64() { return {Kind::Float, 0}; }
  bool is_bool() const { return kind == Kind::Bool; }
  bool is_bv() const { return kind == Kind::BitVec; }
  bool is_fp() const { return kind == Kind::Float; }
  bool operator==(const Sort&) const = default;
  std::string to_string() const;
};

struct Value {
  Sort sort;
  u256 bits = 0;   // bit-vectors, masked to the width
  bool b = false;  // booleans
  double f = 0.0;  // floats

  static Value boolean(bool v);
  static Value bitvec(unsigned width, const u256& bits);
  static Value from_integer(unsigned width, const cpp_int& v);  // reduced modulo 2^width
  static Value fp(double v);

  cpp_int as_unsigned() const;
  cpp_int as_signed() const;
  bool operator==(const Value& other) const;
  bool operator!=(const Value& other) const { return !(*this == other); }
};

namespace bv {

u256 mask(unsigned width);
u256 truncate(const u256& v, unsigned width);
bool msb(const u256& v, unsigned width);
u256 add(const u256& a, const u256& b, unsigned w);
u256 sub(const u256& a, const u256& b, unsigned w);
u256 mul(const u256& a, const u256& b, unsigned w);
u256 neg(const u256& a, unsigned w);
u256 udiv(const u256& a, const u256& b, unsigned w);
u256 urem(const u256& a, const u256& b, unsigned w);
u256 sdiv(const u256& a, const u256& b, unsigned w);
u256 srem(const u256& a, const u256& b, unsigned w);
// Python's flooring division and modulo, built from sdiv/srem.
u256 floordiv(const u256& a, const u256& b, unsigned w);
u256 floormod(const u256& a, const u256& b, unsigned w);
u256 shl(const u256& a, const u256& b, unsigned w);
u256 lshr(const u256& a, const u256& b, unsigned w);
u256 ashr(const u256& a, const u256& b, unsigned w);
bool slt(const u256& a, const u256& b, unsigned w);
bool sle(const u256& a, const u256& b, unsigned w);
u256 sign_extend(const u256& a, unsigned from, unsigned to);

}  // namespace bv

// Decimal rendering (signed or unsigned) and the grouped binary pattern used
// in counterexamples: "00000000 00000000 00000000 00000101".
std::string format_decimal(const Value& v, bool is_signed);
std::string format_binary(const Value& v);
std::string format_float(double v);

}  // namespace pybmc
