class Counter:
    step: int = 3

    def __init__(self) -> None:
        self.value = 0

    def tick(self) -> None:
        self.value += self.step

c = Counter()
c.tick()
c.tick()
assert c.value == 6
