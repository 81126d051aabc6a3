x: int = nondet_int()
__ESBMC_assume(x > 0 and x < 100)
assert bool(x)
assert not bool(x - x)
assert float(x) > 0.0
