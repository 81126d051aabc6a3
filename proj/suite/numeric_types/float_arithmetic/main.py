a: float = 0.5
b: float = 0.25
c: float = a + b
assert c == 0.75
assert a * 4.0 == 2.0
assert 1.0 / 4.0 == b
