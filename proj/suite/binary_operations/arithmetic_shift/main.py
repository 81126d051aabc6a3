x: int = -64
assert x >> 3 == -8
assert x << 1 == -128
