def sign(x: int) -> int:
    if x > 0:
        return 1
    elif x < 0:
        return -1
    else:
        return 0

v: int = nondet_int()
__ESBMC_assume(v > -1000000 and v < 1000000)
s: int = sign(v)
assert s * s <= 1
if v != 0:
    assert s * v > 0
