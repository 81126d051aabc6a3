x: int = nondet_int()
__ESBMC_assume(0 < x < 10)
assert 0 <= x - 1 < 9
