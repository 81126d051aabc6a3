b: uint32 = nondet_uint32()
c: uint32 = b + 1
assert c > b
