a: int = 0b1011
b: int = 0b0110
assert a & b == 0b0010
assert a | b == 0b1111
assert a ^ b == 0b1101
assert ~a == -12
