a: int = 17
b: int = 5
assert a // b == 3
assert a % b == 2
assert -a // b == -4
assert -a % b == 3
assert a // -b == -4
assert a % -b == -3
