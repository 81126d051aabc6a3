b: uint32 = 200
c: uint32 = (b + 100) & 0xff
assert c == 44
d: uint32 = b >> 4
assert d == 12
