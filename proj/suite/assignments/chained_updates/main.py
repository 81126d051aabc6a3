x: int = 1
y: int = x + 1
x = y * 3
y = x - y
assert x == 6
assert y == 4
