def roll() -> int:
    v: int = nondet_int()
    __ESBMC_assume(v >= 1 and v <= 6)
    return v

a: int = roll()
b: int = roll()
assert a == b
