x: int = nondet_int()
__ESBMC_assume(x > 5)
__ESBMC_assume(x < 3)
assert False
