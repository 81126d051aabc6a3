a: int = nondet_int()
b: int = nondet_int()
m: int = a if a > b else b
assert m >= a and m >= b
