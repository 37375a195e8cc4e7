"""The adjoint projection onto Whitney forms, and why it is useful.

The projector P matches the pairing <d., mu> - <., delta mu> against a
dual test family of equal dimension.  It reproduces Whitney forms, kills
the parts a Whitney form cannot see, and commutes with d; that last
property is what transports conforming functions into the glued
nonconforming space later.
"""

from boxforms import CellBox, LocalProjector, PolyForm, Polynomial, format_form
from boxforms.spaces import Q1MINUS, basis

T = CellBox.reference(2)
x1 = Polynomial.variable(2, 1)
x2 = Polynomial.variable(2, 2)

proj0 = LocalProjector(0, T)
proj1 = LocalProjector(1, T)

print("trial space (k=0):", ",  ".join(format_form(f) for f in proj0.trial))
print("test space        :", ",  ".join(format_form(f) for f in proj0.tests))
print()

# the bilinear bubble has no Whitney shadow on the symmetric cell
bubble = PolyForm.from_scalar(x1 * x2)
print("P(x1*x2)          =", format_form(proj0.project(bubble)))

# affine functions are reproduced
affine = PolyForm.from_scalar(x1 + Polynomial.constant(2, 3))
print("P(3 + x1)         =", format_form(proj0.project(affine)))

# a tensor edge form: the symmetric part is projected out
edge = PolyForm.covector(2, (1,), Polynomial(2, {(0, 0): 1, (0, 1): 1}))  # (1 + x2) dx1
print("P((1 + x2) dx1)   =", format_form(proj1.project(edge)))

# commuting: project-then-d equals d-then-project, exactly
for omega in basis(Q1MINUS, 0, T):
    left = proj1.project(omega.exterior_derivative())
    right = proj0.project(omega).exterior_derivative()
    assert left == right
print()
print("P(d omega) == d(P omega) on every tensor basis function: True")
