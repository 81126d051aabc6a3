c: int = 0
for i in range(3):
    for j in range(i):
        c += 1
assert c == 3
