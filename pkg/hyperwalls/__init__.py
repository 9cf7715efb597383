# Hyperbolic reflection-wall arrangements package
