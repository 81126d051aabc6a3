n: int = 3
x: float = n * 1.5
assert x == 4.5
assert float(n) / 2.0 == 1.5
