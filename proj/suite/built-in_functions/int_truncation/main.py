f: float = 7.9
i: int = int(f)
assert i == 8
