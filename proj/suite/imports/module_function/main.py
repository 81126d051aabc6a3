import mathlib

x: int = nondet_int()
__ESBMC_assume(x >= -100 and x <= 100)
assert mathlib.square(x) >= 0
assert mathlib.cube(2) == 8
