x: int = nondet_int()
__ESBMC_assume(x >= 0 and x < 10)
grade: int = 0
if x >= 7:
    grade = 3
elif x >= 4:
    grade = 2
elif x >= 1:
    grade = 1
assert grade > 0
