x: int = nondet_int()
__ESBMC_assume(x > -46340 and x < 46340)
assert x * x >= 0
