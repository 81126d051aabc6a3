from mathlib import square

x: int = nondet_int()
__ESBMC_assume(x >= 0 and x <= 20)
assert square(x) < 400
