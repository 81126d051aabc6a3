found: int = -1
xs: list[int] = [3, 9, 4, 12, 7]
for k in range(5):
    if xs[k] % 2 == 1:
        continue
    found = k
    break
assert found == 2
