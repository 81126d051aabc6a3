a: uint256 = nondet_uint256()
__ESBMC_assume(a > 0)
b: uint256 = a * 2
assert b > a
