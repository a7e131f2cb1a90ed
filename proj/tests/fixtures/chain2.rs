structure chain2 over pos
points a b
edge le(a, a)
edge le(a, b)
edge le(b, b)
