class A:
    def who(self) -> int:
        return 1

class B(A):
    def who(self) -> int:
        return 2

class C(A):
    def who(self) -> int:
        return 3

class D(B, C):
    pass

d = D()
assert d.who() == 2
