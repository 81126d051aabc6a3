def scale(x: int, factor: int) -> int:
    return x * factor

r: int = scale(7, 3)
assert r == 21
