structure chain3 over pos
points a b c
edge le(a, a)
edge le(a, b)
edge le(a, c)
edge le(b, b)
edge le(b, c)
edge le(c, c)
