structure disc2 over pos
points a b
edge le(a, a)
edge le(b, b)
