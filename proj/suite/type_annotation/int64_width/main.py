big: int64 = 3000000000
big = big * 2
assert big == 6000000000
