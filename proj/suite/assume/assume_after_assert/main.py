x: int = nondet_int()
assert x != 7
__ESBMC_assume(x != 7)
