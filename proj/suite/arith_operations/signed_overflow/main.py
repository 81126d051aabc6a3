a: int = nondet_int()
__ESBMC_assume(a > 1000000)
b: int = a * 4096
assert b > a
