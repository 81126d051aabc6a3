class Point:
    def __init__(self, x: int, y: int) -> None:
        self.x = x
        self.y = y

    def manhattan(self) -> int:
        return abs(self.x) + abs(self.y)

    def shift(self, dx: int) -> None:
        self.x = self.x + dx

p = Point(3, -4)
assert p.manhattan() == 7
p.shift(2)
assert p.x == 5
assert p.manhattan() == 9
