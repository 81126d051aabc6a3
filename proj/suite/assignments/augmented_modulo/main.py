v: int = 47
v %= 10
v <<= 2
v |= 1
assert v == 29
