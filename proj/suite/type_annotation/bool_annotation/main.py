flag: bool = True
count: int = 0
if flag:
    count = 1
assert count == 1
