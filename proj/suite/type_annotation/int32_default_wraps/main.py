x: int = 2147483647
y: int = x + 1
assert y > x
