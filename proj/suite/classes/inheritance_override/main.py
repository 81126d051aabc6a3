class Shape:
    def __init__(self, size: int) -> None:
        self.size = size

    def area(self) -> int:
        return 0

class Square(Shape):
    def area(self) -> int:
        return self.size * self.size

class Line(Shape):
    pass

s = Square(4)
l = Line(4)
assert s.area() == 16
assert l.area() == 16
