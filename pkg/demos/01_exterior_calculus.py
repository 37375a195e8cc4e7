"""Exact exterior calculus on boxes: a quick tour.

Polynomial differential forms with Fraction coefficients, the operators
d, star, delta, kappa, and the identities that hold exactly (no floating
point anywhere in this script).
"""

from fractions import Fraction

from boxforms import CellBox, PolyForm, Polynomial, boundary_bump, format_form

n = 2
x1 = Polynomial.variable(n, 1)
x2 = Polynomial.variable(n, 2)
T = CellBox.reference(n)  # [-1, 1]^2

# -- build a 1-form and differentiate it ------------------------------------
omega = PolyForm.covector(n, (1,), x1 * x2) + PolyForm.covector(n, (2,), x2)
print("omega              =", format_form(omega))
print("d omega            =", format_form(omega.exterior_derivative()))
print("d(d omega)         =", format_form(omega.exterior_derivative().exterior_derivative()))

# -- Hodge star and codifferential ------------------------------------------
print("star omega         =", format_form(omega.hodge()))
print("star star omega    =", format_form(omega.hodge().hodge()), " (sign (-1)^{k(n-k)})")
print("delta omega        =", format_form(omega.codifferential()))

# delta is the formal adjoint of d: with a coefficient that kills the
# boundary, <d w, mu> = <w, delta mu> holds exactly on any box
K = CellBox((0, 0), (1, 3))
w = PolyForm.from_scalar(x1 * x2) * boundary_bump(K)
mu = PolyForm.covector(n, (1,), x1 * x1) + PolyForm.covector(n, (2,), x2)
lhs = w.exterior_derivative().inner_product(mu, K)
rhs = w.inner_product(mu.codifferential(), K)
print("adjointness        =", lhs, "==", rhs, "->", lhs == rhs)

# -- Koszul operator and the homotopy identity ------------------------------
vol = PolyForm.covector(n, (1, 2))
print("kappa(dx1^dx2)     =", format_form(vol.koszul()))

# on forms with homogeneous degree-r coefficients, d kappa + kappa d = (r+k) id
eta = PolyForm.covector(n, (1,), x1 * x2)  # r = 2, k = 1
both = eta.koszul().exterior_derivative() + eta.exterior_derivative().koszul()
print("homotopy identity  =", format_form(both), "== 3 * omega ->", both == 3 * eta)

# -- exact integration --------------------------------------------------------
w1 = PolyForm.covector(n, (1,), x2)
print("<x2 dx1, x2 dx1>_T =", w1.inner_product(w1, T), " (exact rational)")
