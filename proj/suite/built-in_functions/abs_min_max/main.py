a: int = nondet_int()
b: int = nondet_int()
__ESBMC_assume(a > -1000 and a < 1000 and b > -1000 and b < 1000)
assert abs(a) >= 0
assert min(a, b) <= max(a, b)
assert min(a, b) + max(a, b) == a + b
