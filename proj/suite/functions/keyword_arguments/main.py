def clamp(x: int, lo: int = 0, hi: int = 10) -> int:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x

v: int = nondet_int()
c: int = clamp(v, hi=5)
assert c >= 0 and c <= 5
assert clamp(20) == 10
