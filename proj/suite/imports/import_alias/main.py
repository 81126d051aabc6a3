import mathlib as m

assert m.cube(3) == 9
