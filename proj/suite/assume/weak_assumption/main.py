x: int = nondet_int()
__ESBMC_assume(x >= 10 and x <= 21)
assert x * 2 <= 40
