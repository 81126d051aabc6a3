a: bool = nondet_bool()
b: bool = nondet_bool()
c: bool = a != b
assert c or a
