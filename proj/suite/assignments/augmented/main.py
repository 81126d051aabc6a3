total: int = 10
total += 5
total *= 2
total -= 7
total //= 3
assert total == 8
