a: int = nondet_int()
__ESBMC_assume(a > -1000 and a < 1000)
b: int = -a
assert a + b == 0
assert b * b == a * a
