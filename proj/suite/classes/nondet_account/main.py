class Account:
    def __init__(self, balance: int) -> None:
        self.balance = balance

    def withdraw(self, amount: int) -> None:
        if amount <= self.balance:
            self.balance -= amount

a = Account(100)
w: int = nondet_int()
__ESBMC_assume(w >= 0 and w <= 200)
a.withdraw(w)
assert a.balance > 0
