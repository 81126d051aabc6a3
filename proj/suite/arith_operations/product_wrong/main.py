x: int = 12
y: int = 11
z: int = x * y - x
assert z == 121
