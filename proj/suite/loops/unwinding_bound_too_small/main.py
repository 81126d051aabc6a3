i: int = 0
while i < 10:
    i += 1
assert i == 10
