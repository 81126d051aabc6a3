x: int = 3
y: int = x << 4
z: int = y >> 1
assert z == 48
