f: float = nondet_float()
__ESBMC_assume(f >= 0.0 and f <= 1.0)
assert f * 2.0 <= 2.0
