"""Integral forms: signature, parity, determinant, and the odd indefinite model."""
from kirbylab import lattice
from kirbylab.rbd import cp_matrix

# the C_7 plumbing: a -2 chain capped by -9
Q = cp_matrix(7)
print(Q.to_grid())
print("(signature, nullity):", lattice.signature(Q))
print("det:", lattice.determinant(Q), " parity:", lattice.parity(Q))
print("invariant factors:", lattice.invariant_factors(Q.entries))

# |det| = p^2 down the family
for p in range(2, 13):
    print(p, abs(lattice.determinant(cp_matrix(p))))

# a unimodular odd indefinite form is pinned down by rank and signature
F = lattice.form_class(lattice.diagonal([1] + [-1] * 8))
print(F, "->", lattice.classify_indefinite_odd(F.rank, F.signature))

# stabilizing with the hyperbolic plane keeps parity
H = lattice.form_class(lattice.hyperbolic())
print(F + H, lattice.stable_equivalent(F + H, F + H))
print("E8-type even form passes Rokhlin?", lattice.rokhlin_constraint(lattice.FormClass(8, -8, "even")))
