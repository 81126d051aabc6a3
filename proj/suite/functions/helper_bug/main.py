def average(a: int, b: int) -> int:
    return a + b // 2

x: int = nondet_int()
__ESBMC_assume(x >= 0 and x <= 100)
assert average(x, x) == x
