flag: bool = nondet_bool()
x: int = 0
if flag:
    x = 1
else:
    x = 2
assert x == 1
