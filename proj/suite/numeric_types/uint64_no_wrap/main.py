def integer_squareroot(n: uint64) -> uint64:
    x = n
    y = (x + 1) // 2
    while y < x:
        x = y
        y = (x + n // x) // 2
    return x

assert integer_squareroot(16) == 4
assert integer_squareroot(17) == 4
