a: bool = nondet_bool()
b: bool = nondet_bool()
assert (not a or b) == (a or not b)
