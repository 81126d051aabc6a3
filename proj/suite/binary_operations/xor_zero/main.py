a: int = nondet_int()
b: int = nondet_int()
__ESBMC_assume(a >= 0 and a < 16 and b >= 0 and b < 16)
assert a ^ b != 0
