a: float = 0.1
b: float = 0.2
assert a + b == 0.3
