"""Exact Gaussian elimination over Fraction: rank, kernels, solves, spans.

One deterministic elimination routine backs every rank and kernel
computation in the package: pivots are chosen as the first row with a
nonzero entry in the leftmost unfinished column, rows stay in the order
given.  Kernels come out in the canonical reduced form (one basis vector
per free column, unit entry there), so downstream bases are reproducible.
"""

from fractions import Fraction


class SingularMatrixError(ValueError):
    pass


def _copy(matrix):
    return [list(row) for row in matrix]


def rref(matrix):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    m = _copy(matrix)
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [v / pv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(matrix):
    return len(rref(matrix)[1])


def nullspace(matrix, ncols=None):
    """Canonical kernel basis, one vector per free column."""
    if not matrix:
        if ncols is None:
            raise ValueError("nullspace of an empty matrix needs ncols")
        return [[Fraction(i == j) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(matrix)
    ncols = len(matrix[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(matrix, rhs):
    """Unique solution of a square nonsingular system; exact."""
    n = len(matrix)
    if n == 0:
        return []
    if any(len(row) != n for row in matrix):
        raise ValueError("solve expects a square matrix")
    aug = [list(row) + [b] for row, b in zip(_copy(matrix), rhs)]
    red, pivots = rref(aug)
    if len(pivots) != n or pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [red[i][n] for i in range(n)]


def invert(matrix):
    """Exact inverse of a square nonsingular matrix."""
    n = len(matrix)
    aug = [list(row) + [Fraction(i == j) for j in range(n)]
           for i, row in enumerate(matrix)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red]


def mat_vec(matrix, vec):
    return [sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in matrix]


def determinant(matrix):
    """Exact determinant via fraction-free style elimination on a copy."""
    m = _copy(matrix)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        pv = m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / pv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


# -- span utilities (rows are coefficient vectors)


def span_rank(vectors):
    return rank(vectors) if vectors else 0


def in_span(vectors, candidate):
    """True if candidate is a linear combination of the given vectors."""
    if not any(candidate):
        return True
    if not vectors:
        return False
    return rank(vectors) == rank(vectors + [candidate])


def spans_equal(vecs_a, vecs_b):
    """Mutual containment by three rank computations."""
    ra = span_rank(vecs_a)
    rb = span_rank(vecs_b)
    if ra != rb:
        return False
    return span_rank(vecs_a + vecs_b) == ra


def independent_subset(vectors):
    """Indices of a maximal independent subset, scanning in the order given."""
    if not vectors:
        return []
    ncols = len(vectors[0])
    kept = []
    rows = []  # running echelon of the kept vectors
    for idx, v in enumerate(vectors):
        work = list(v)
        for pivot_col, row in rows:
            if work[pivot_col]:
                f = work[pivot_col]
                work = [a - f * b for a, b in zip(work, row)]
        pc = next((c for c in range(ncols) if work[c]), None)
        if pc is None:
            continue
        pv = work[pc]
        work = [a / pv for a in work]
        rows.append((pc, work))
        rows.sort(key=lambda pr: pr[0])
        kept.append(idx)
    return kept
