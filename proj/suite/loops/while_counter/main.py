n: int = 0
i: int = 0
while i < 4:
    n += 2
    i += 1
assert n == 6
