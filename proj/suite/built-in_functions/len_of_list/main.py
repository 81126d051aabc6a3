xs: list[int] = [4, 8, 15, 16, 23, 42]
assert len(xs) == 6
assert xs[len(xs) - 1] == 42
