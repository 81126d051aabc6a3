x: uint32 = nondet_uint32()
y: uint64 = uint64(x)
assert y <= 4294967295
z: uint64 = y * y
assert z <= 18446744065119617025
