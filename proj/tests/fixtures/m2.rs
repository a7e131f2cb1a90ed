structure m2 over met
points a b
edge eq[0](a, a)
edge eq[0](b, b)
edge eq[1/2](a, b)
edge eq[1/2](b, a)
