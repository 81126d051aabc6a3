a: int = nondet_int()
__ESBMC_assume(a >= 0 and a < 1000)
assert (a & 1) == a % 2
