#include <doctest.h>

#include "pybmc/value.hpp"

using namespace pybmc;

namespace {

// Python's floor division on unbounded integers, then wrapped to the width.
cpp_int py_floordiv(const cpp_int& a, const cpp_int& b) {
  cpp_int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

cpp_int to_signed(const u256& bits, unsigned w) {
  cpp_int v(bits);
  if (v >= (cpp_int(1) << (w - 1))) v -= cpp_int(1) << w;
  return v;
}

}  // namespace

TEST_CASE("floordiv and floormod match Python on every 8-bit pair") {
  const unsigned w = 8;
  for (int a = -128; a < 128; ++a) {
    for (int b = -128; b < 128; ++b) {
      if (b == 0) continue;
      const u256 ba = Value::from_integer(w, a).bits;
      const u256 bb = Value::from_integer(w, b).bits;
      const cpp_int q = py_floordiv(a, b);
      const cpp_int r = cpp_int(a) - q * b;
      CHECK(Value::bitvec(w, bv::floordiv(ba, bb, w)) == Value::from_integer(w, q));
      CHECK(to_signed(bv::floormod(ba, bb, w), w) == r);
    }
  }
}

TEST_CASE("division by zero follows the SMT-LIB totalization") {
  const unsigned w = 32;
  const u256 seven = 7;
  CHECK(bv::udiv(seven, 0, w) == bv::mask(w));
  CHECK(bv::urem(seven, 0, w) == seven);
}

TEST_CASE("from_integer wraps modulo the width") {
  CHECK(Value::from_integer(32, cpp_int(1) << 32).as_unsigned() == 0);
  CHECK(Value::from_integer(32, -1).as_unsigned() == cpp_int("4294967295"));
  CHECK(Value::from_integer(64, -1).as_signed() == -1);
  CHECK(Value::from_integer(256, -1).as_unsigned() == (cpp_int(1) << 256) - 1);
}

TEST_CASE("counterexample formatting") {
  const Value five = Value::from_integer(32, 5);
  CHECK(format_binary(five) == "00000000 00000000 00000000 00000101");
  CHECK(format_decimal(Value::from_integer(32, -3), true) == "-3");
  CHECK(format_decimal(Value::from_integer(32, -3), false) == "4294967293");
}

TEST_CASE("signed comparison and arithmetic shift") {
  const unsigned w = 32;
  const u256 minus_one = Value::from_integer(w, -1).bits;
  CHECK(bv::slt(minus_one, 0, w));
  CHECK_FALSE(bv::slt(0, minus_one, w));
  CHECK(bv::ashr(minus_one, 4, w) == minus_one);
  CHECK(bv::lshr(minus_one, 28, w) == 15);
  CHECK(bv::sign_extend(Value::from_integer(32, -2).bits, 32, 64) == Value::from_integer(64, -2).bits);
}
