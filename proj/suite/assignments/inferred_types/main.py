a = 5
b = a * 2
c = b > a
assert c
f = 1.5
g = f * 2.0
assert g == 3.0
