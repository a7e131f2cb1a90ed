# a 2-cycle in pos: antisymmetry collapses it
structure cycle over pos
points a b
edge le(a, b)
edge le(b, a)
