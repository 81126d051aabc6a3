d: int = nondet_int()
__ESBMC_assume(d >= 0 and d < 10)
q: int = 100 // d
assert q >= 10
