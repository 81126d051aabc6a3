n: int = nondet_int()
__ESBMC_assume(n >= 0 and n <= 3)
s: int = 0
i: int = 0
while i < n:
    s += i
    i += 1
assert s != 3
