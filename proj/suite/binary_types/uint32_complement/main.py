x: uint32 = 0x0000ffff
y: uint32 = ~x
assert y == 0xffff0000
