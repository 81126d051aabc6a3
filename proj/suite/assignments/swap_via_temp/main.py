a: int = nondet_int()
b: int = nondet_int()
__ESBMC_assume(a >= 0 and a < 100 and b >= 0 and b < 100)
tmp: int = a
a = b
b = a
assert b == tmp
