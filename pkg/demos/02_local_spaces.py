"""The five local form families on a cell, and their structure.

Whitney forms (the trimmed first-order family), the tensor-product
family, their Hodge duals, and the exact kernel/range/orthogonality
relations between them.
"""

from boxforms import (CellBox, P0, P1MINUS, P1MINUS_STAR, Q1MINUS, Q1MINUS_STAR,
                      basis, check_Q_exactness, check_local_couple,
                      check_orthogonality, dimension, format_form)

T = CellBox.reference(2)

print("== bases on T = [-1,1]^2, k = 1 ==")
for kind in (P0, P1MINUS, P1MINUS_STAR, Q1MINUS, Q1MINUS_STAR):
    sb = basis(kind, 1, T)
    print(f"{kind:13s} dim {len(sb)}:  " + ",  ".join(format_form(f) for f in sb))

print()
print("== dimension formulas across degrees (n = 3) ==")
for k in range(4):
    dims = {kind: dimension(kind, k, 3) for kind in (P1MINUS, Q1MINUS, Q1MINUS_STAR)}
    print(f"k={k}:  Whitney {dims[P1MINUS]:2d}   tensor {dims[Q1MINUS]:2d}   "
          f"dual tensor {dims[Q1MINUS_STAR]:2d}")

print()
print("== structural identities (exact rank computations) ==")
# the Whitney family and its dual pair up: ranges and kernels are constants
report = check_local_couple(0, 2)
print("range/kernel couple     k=0, n=2:", "pass" if report.passed else report.to_dict())

# along the tensor family, kernel of d equals range of d one degree down
report = check_Q_exactness(1, 2)
print("tensor exactness        k=1, n=2:", "pass" if report.passed else report.to_dict())

# centered tensor monomials and their duals only pair up on the constant diagonal
report = check_orthogonality(2, 1, CellBox((0, 0), (1, 3)))
print("dual orthogonality (stretched box):", "pass" if report.passed else report.to_dict())
