def twice(x: int):
    return x + x

y = twice(nondet_int())
assert y % 2 == 1 or y == 0
