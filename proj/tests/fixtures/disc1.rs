structure disc1 over pos
points a
edge le(a, a)
