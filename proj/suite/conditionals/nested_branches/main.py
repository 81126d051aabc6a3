a: int = nondet_int()
b: int = nondet_int()
__ESBMC_assume(a >= 0 and a < 8 and b >= 0 and b < 8)
r: int = 0
if a > 3:
    if b > 3:
        r = 1
    else:
        r = 2
else:
    if b == 7:
        r = 3
assert r != 3
