def gcd(a: int, b: int) -> int:
    if b == 0:
        return a
    return gcd(b, a % b)

assert gcd(12, 18) == 6
assert gcd(35, 14) == 7
