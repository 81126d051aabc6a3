x: uint32 = nondet_uint32()
y: uint32 = x & 0xff
assert y < 255
