from shapes import Rect

r = Rect(3, 4)
assert r.area() == 12
assert r.perimeter() == 14
