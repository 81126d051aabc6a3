d: int = nondet_int()
ok: bool = d != 0 and 10 // d >= 0 or d == 0
x: int = nondet_int()
__ESBMC_assume(x >= 0)
safe: bool = d == 0 or 10 % d <= 10
assert safe
