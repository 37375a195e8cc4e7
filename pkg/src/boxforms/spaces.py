"""Canonical bases of the lowest-order local form spaces on a box cell.

Five families, all spanned by centered monomial forms ``t_tau dx^sigma``
where ``t_i = x_i - c_i`` are the cell-centered coordinates and tau is a
squarefree multi-index:

* ``P0``          constant k-forms, one per increasing index sigma;
* ``P1minus``     Whitney forms: constants plus centered-Koszul lifts of
                  constant (k+1)-forms, pruned to independence;
* ``P1minusStar`` Hodge dual of P1minus at complementary degree;
* ``Q1minus``     tensor-product family: tau inside the complement of sigma;
* ``Q1minusStar`` its Hodge dual: tau inside sigma.

Basis order is lexicographic in sigma, then in (|tau|, tau); all matrix
layouts downstream inherit that numbering.  The structural checks at the
bottom verify the kernel/range, orthogonality and projection identities
these families satisfy, by exact elimination.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .exactla import independent_subset, nullspace, rank, rref, spans_equal
from .forms import CellBox, PolyForm, Polynomial, adjoint_pairing
from .indices import complement, multi_indices
from .reports import CheckReport

P0 = "P0"
P1MINUS = "P1minus"
P1MINUS_STAR = "P1minusStar"
Q1MINUS = "Q1minus"
Q1MINUS_STAR = "Q1minusStar"

KINDS = (P0, P1MINUS, P1MINUS_STAR, Q1MINUS, Q1MINUS_STAR)


@dataclass
class SpaceBasis:
    kind: str
    k: int
    cell: CellBox
    elements: list
    labels: list  # (sigma, tau) per element where meaningful, else None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def n(self):
        return self.cell.n


def dimension(kind, k, n):
    """Dimension of the local space; raises for incompatible (kind, k)."""
    if not 0 <= k <= n:
        raise ValueError(f"no degree-{k} forms in dimension {n}")
    if kind == P0:
        return comb(n, k)
    if kind == P1MINUS:
        return comb(n + 1, k + 1)
    if kind == P1MINUS_STAR:
        return comb(n + 1, n - k + 1)
    if kind == Q1MINUS:
        return comb(n, k) * 2 ** (n - k)
    if kind == Q1MINUS_STAR:
        return comb(n, k) * 2 ** k
    raise ValueError(f"unknown space kind {kind!r}")


def _subsets(axes):
    """All sub-tuples, ordered by (cardinality, lexicographic)."""
    out = []
    for r in range(len(axes) + 1):
        out.extend(combinations(axes, r))
    return out


def _centered_monomial(n, tau, center):
    poly = Polynomial.constant(n, 1)
    for i in tau:
        poly = poly * Polynomial.variable(n, i, shift=center[i - 1])
    return poly


def basis(kind, k, cell):
    """Canonical basis of the requested space on the given cell."""
    n = cell.n
    dim = dimension(kind, k, n)  # validates (kind, k)
    center = cell.center
    if kind == P0:
        elements = [PolyForm.covector(n, sigma) for sigma in multi_indices(k, n)]
        labels = [(sigma, ()) for sigma in multi_indices(k, n)]
    elif kind == Q1MINUS:
        elements, labels = [], []
        for sigma in multi_indices(k, n):
            for tau in _subsets(complement(sigma, n)):
                elements.append(PolyForm.covector(n, sigma, _centered_monomial(n, tau, center)))
                labels.append((sigma, tau))
    elif kind == Q1MINUS_STAR:
        elements, labels = [], []
        for sigma in multi_indices(k, n):
            for tau in _subsets(sigma):
                elements.append(PolyForm.covector(n, sigma, _centered_monomial(n, tau, center)))
                labels.append((sigma, tau))
    elif kind == P1MINUS:
        # constants first (in index order), then Koszul lifts; by the Pascal
        # identity C(n,k) + C(n,k+1) = C(n+1,k+1) nothing is ever pruned,
        # but independence is still verified by elimination.
        generators = [PolyForm.covector(n, sigma) for sigma in multi_indices(k, n)]
        gen_labels = [("const", sigma) for sigma in multi_indices(k, n)]
        if k < n:
            generators += [PolyForm.covector(n, gamma).koszul(center)
                           for gamma in multi_indices(k + 1, n)]
            gen_labels += [("koszul", gamma) for gamma in multi_indices(k + 1, n)]
        vectors = coefficient_vectors(generators)
        keep = independent_subset(vectors)
        elements = [generators[i] for i in keep]
        labels = [gen_labels[i] for i in keep]
    elif kind == P1MINUS_STAR:
        dual = basis(P1MINUS, n - k, cell)
        elements = [f.hodge() for f in dual.elements]
        labels = [None] * len(elements)
    else:
        raise ValueError(f"unknown space kind {kind!r}")
    if len(elements) != dim:
        raise AssertionError(
            f"{kind} Lambda^{k} in dim {n}: built {len(elements)} elements, expected {dim}")
    return SpaceBasis(kind, k, cell, elements, labels)


# ---------------------------------------------------------------------------
# spans of forms as exact coefficient vectors


def coefficient_vectors(forms, frame=None):
    """Represent forms as vectors over a shared (index, exponent) frame.

    When ``frame`` is omitted it is the sorted union of keys present; pass
    the returned vectors of several groups through one call (concatenated)
    when they must be comparable.
    """
    if frame is None:
        frame = sorted({(alpha, e) for f in forms
                        for alpha, poly in f.parts.items() for e in poly.coeffs})
    pos = {key: i for i, key in enumerate(frame)}
    vectors = []
    for f in forms:
        v = [Fraction(0)] * len(frame)
        for alpha, poly in f.parts.items():
            for e, c in poly.coeffs.items():
                v[pos[(alpha, e)]] = c
        vectors.append(v)
    return vectors


def _common_vectors(*groups):
    frame = sorted({(alpha, e) for group in groups for f in group
                    for alpha, poly in f.parts.items() for e in poly.coeffs})
    return [coefficient_vectors(group, frame) for group in groups]


def form_spans_equal(group_a, group_b):
    va, vb = _common_vectors(group_a, group_b)
    if not va and not vb:
        return True
    return spans_equal(va, vb)


def form_span_rank(group):
    vectors = coefficient_vectors(group)
    return rank(vectors) if vectors else 0


def expand_in_span(basis_forms, target):
    """Exact coefficients of target over an independent list of forms.

    Returns None when the target lies outside the span.
    """
    if target.is_zero():
        return [Fraction(0)] * len(basis_forms)
    groups = _common_vectors(basis_forms, [target])
    basis_vecs, (target_vec,) = groups
    m = len(basis_forms)
    system = [[basis_vecs[j][i] for j in range(m)] + [target_vec[i]]
              for i in range(len(target_vec))]
    red, pivots = rref(system)
    if m in pivots:
        return None
    if pivots != list(range(m)):
        raise ValueError("expand_in_span requires an independent basis")
    return [red[r][m] for r in range(m)]


def operator_kernel(space, op):
    """Forms spanning the kernel of a linear operator restricted to a span."""
    images = [op(f) for f in space]
    nonzero = [f for f in images if not f.is_zero()]
    if not nonzero:
        return list(space)
    columns = coefficient_vectors(images)
    # rows of the elimination system = frame entries, columns = basis elements
    system = [[columns[j][i] for j in range(len(images))] for i in range(len(columns[0]))]
    kernel = []
    for coeffs in nullspace(system):
        form = PolyForm.zero(space[0].n, space[0].k)
        for c, f in zip(coeffs, space):
            if c:
                form = form + c * f
        kernel.append(form)
    return kernel


# ---------------------------------------------------------------------------
# structural checks (exact, report-valued)


def check_local_couple(k, n, cell=None):
    """Range/kernel couplings between the Whitney family and its dual.

    Verifies, as exact span equalities on the cell:
    range(d, P1minus^k) = P0^(k+1) = kernel(delta, P1minusStar^(k+1)) and
    kernel(d, P1minus^k) = P0^k = range(delta, P1minusStar^(k+1)).
    """
    if not 0 <= k <= n - 1:
        raise ValueError(f"need 0 <= k <= n-1, got k={k}, n={n}")
    cell = cell or CellBox.reference(n)
    whitney = basis(P1MINUS, k, cell)
    dual = basis(P1MINUS_STAR, k + 1, cell)
    const_k = basis(P0, k, cell).elements
    const_k1 = basis(P0, k + 1, cell).elements

    checks = {
        "range_d_eq_const": form_spans_equal(
            [f.exterior_derivative() for f in whitney], const_k1),
        "kernel_delta_eq_const": form_spans_equal(
            operator_kernel(dual, lambda f: f.codifferential()), const_k1),
        "kernel_d_eq_const": form_spans_equal(
            operator_kernel(whitney, lambda f: f.exterior_derivative()), const_k),
        "range_delta_eq_const": form_spans_equal(
            [f.codifferential() for f in dual], const_k),
    }
    bad = [name for name, ok in checks.items() if not ok]
    return CheckReport("local_couple", n, k, not bad,
                       counterexample=", ".join(bad) or None,
                       details={name: bool(ok) for name, ok in checks.items()})


def check_Q_exactness(k, n, cell=None):
    """Kernel = range along the tensor-product family, plus its splitting.

    At degree k (1 <= k <= n): kernel(d, Q1minus^k) = range(d, Q1minus^(k-1)),
    the Hodge-conjugate statement for the star family at degree n-k, and the
    direct sum  Q1minus^k = range(d, Q1minus^(k-1)) (+) kappa(range(d, Q1minus^k)).
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    cell = cell or CellBox.reference(n)
    center = cell.center
    q_k = basis(Q1MINUS, k, cell)
    q_km1 = basis(Q1MINUS, k - 1, cell)

    kernel = operator_kernel(q_k, lambda f: f.exterior_derivative())
    image = [f.exterior_derivative() for f in q_km1]
    checks = {"kernel_eq_range": form_spans_equal(kernel, image)}

    if k <= n - 1:
        qs_j = basis(Q1MINUS_STAR, n - k, cell)
        qs_j1 = basis(Q1MINUS_STAR, n - k + 1, cell)
        kernel_star = operator_kernel(qs_j, lambda f: f.codifferential())
        image_star = [f.codifferential() for f in qs_j1]
        checks["star_kernel_eq_range"] = form_spans_equal(kernel_star, image_star)

    images_k = [f.exterior_derivative() for f in q_k]
    lifted = [df.koszul(center) for df in images_k if not df.is_zero()]
    r_image = form_span_rank(image)
    r_lift = form_span_rank(lifted)
    together = image + lifted
    checks["direct_sum"] = (
        r_image + r_lift == len(q_k)
        and form_span_rank(together) == len(q_k)
        and form_spans_equal(together, list(q_k)))

    bad = [name for name, ok in checks.items() if not ok]
    return CheckReport("tensor_exactness", n, k, not bad,
                       counterexample=", ".join(bad) or None,
                       details={name: bool(ok) for name, ok in checks.items()})


def check_orthogonality(n, k, cell=None):
    """Pairing structure between the tensor family and its Hodge dual.

    Over the cell, <t_tau dx^sigma, t_tau' dx^sigma'> vanishes unless
    tau = tau' = () and sigma = sigma'; the surviving diagonal equals the
    cell volume.
    """
    cell = cell or CellBox.reference(n)
    primal = basis(Q1MINUS, k, cell)
    dual = basis(Q1MINUS_STAR, k, cell)
    for (sigma, tau), omega in zip(primal.labels, primal.elements):
        for (sigma2, tau2), mu in zip(dual.labels, dual.elements):
            value = omega.inner_product(mu, cell)
            diagonal = sigma == sigma2 and tau == tau2 == ()
            if diagonal and value != cell.volume:
                return CheckReport("dual_orthogonality", n, k, False,
                                   counterexample=f"<dx{sigma}, dx{sigma2}> = {value}")
            if not diagonal and value != 0:
                return CheckReport(
                    "dual_orthogonality", n, k, False,
                    counterexample=f"<t{tau} dx{sigma}, t{tau2} dx{sigma2}> = {value}")
    return CheckReport("dual_orthogonality", n, k, True)


def check_ap_identity(k, n, cell=None):
    """The projection pairing identity on the full tensor-product test family.

    For every omega in Q1minus^k and mu in Q1minusStar^(k+1):
    <d P omega, mu> - <P omega, delta mu> = <d omega, mu> - <omega, delta mu>
    where P is the local adjoint projection onto P1minus^k.
    """
    from .projection import LocalProjector  # deferred: projection builds on bases

    if not 0 <= k <= n - 1:
        raise ValueError(f"need 0 <= k <= n-1, got k={k}, n={n}")
    cell = cell or CellBox.reference(n)
    projector = LocalProjector(k, cell)
    trial = basis(Q1MINUS, k, cell)
    tests = basis(Q1MINUS_STAR, k + 1, cell)
    for (sig, tau), omega in zip(trial.labels, trial.elements):
        projected = projector.project(omega)
        for (sig2, tau2), mu in zip(tests.labels, tests.elements):
            lhs = adjoint_pairing(projected, mu, cell)
            rhs = adjoint_pairing(omega, mu, cell)
            if lhs != rhs:
                return CheckReport(
                    "projection_pairing", n, k, False,
                    counterexample=(f"omega = t{tau} dx{sig}, mu = t{tau2} dx{sig2}: "
                                    f"{lhs} != {rhs}"))
    return CheckReport("projection_pairing", n, k, True)
