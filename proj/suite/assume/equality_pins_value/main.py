x: int = nondet_int()
y: int = nondet_int()
__ESBMC_assume(x == 3)
__ESBMC_assume(y == x + 4)
assert y - x == 4
