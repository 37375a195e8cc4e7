from fractions import Fraction
from itertools import product
from math import comb

import pytest

from boxforms.forms import CellBox, PolyForm, Polynomial, format_form
from boxforms.indices import complement, multi_indices
from boxforms.spaces import (P0, P1MINUS, P1MINUS_STAR, Q1MINUS, Q1MINUS_STAR,
                             basis, check_Q_exactness, check_ap_identity,
                             check_local_couple, check_orthogonality,
                             coefficient_vectors, dimension, expand_in_span,
                             form_span_rank, form_spans_equal)

T2 = CellBox.reference(2)
STRETCH2 = CellBox((0, 0), (1, 3))
CELLS = {
    1: [CellBox.reference(1), CellBox((0,), (1,))],
    2: [T2, STRETCH2],
    3: [CellBox.reference(3), CellBox((0, 0, 0), (1, 2, 3))],
    4: [CellBox.reference(4)],
}


def test_dimension_formulas():
    for n in (1, 2, 3, 4):
        for k in range(n + 1):
            assert dimension(P0, k, n) == comb(n, k)
            assert dimension(P1MINUS, k, n) == comb(n + 1, k + 1)
            assert dimension(Q1MINUS, k, n) == comb(n, k) * 2 ** (n - k)
            assert dimension(Q1MINUS_STAR, k, n) == comb(n, k) * 2 ** k
            assert dimension(P1MINUS_STAR, k, n) == dimension(P1MINUS, n - k, n)


def test_bad_kind_and_degree():
    with pytest.raises(ValueError):
        dimension("nope", 0, 2)
    with pytest.raises(ValueError):
        basis(Q1MINUS, 3, T2)


def test_reference_bases_match_spec_listing():
    q = basis(Q1MINUS, 1, T2)
    assert [format_form(f) for f in q] == [
        "(1) * dx[1]", "(x2) * dx[1]", "(1) * dx[2]", "(x1) * dx[2]"]
    qs = basis(Q1MINUS_STAR, 1, T2)
    assert [format_form(f) for f in qs] == [
        "(1) * dx[1]", "(x1) * dx[1]", "(1) * dx[2]", "(x2) * dx[2]"]
    p = basis(P1MINUS, 0, T2)
    assert [format_form(f) for f in p] == ["(1) * dx[]", "(x1) * dx[]", "(x2) * dx[]"]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bases_independent_and_centered(n):
    for cell in CELLS[n]:
        center = cell.center
        for k in range(n + 1):
            for kind in (P0, P1MINUS, P1MINUS_STAR, Q1MINUS, Q1MINUS_STAR):
                sb = basis(kind, k, cell)
                vectors = coefficient_vectors(list(sb))
                assert form_span_rank(list(sb)) == len(sb) == dimension(kind, k, n)
            # centered coordinates: every non-constant tensor monomial integrates to zero
            for (sigma, tau), form in zip(basis(Q1MINUS, k, cell).labels,
                                          basis(Q1MINUS, k, cell).elements):
                if tau:
                    assert cell.integrate(form.parts[sigma]) == 0


def tensor_product_presentation(k, cell):
    """Direct per-axis construction: degree <= 1 off sigma, degree 0 on sigma."""
    n = cell.n
    out = []
    for sigma in multi_indices(k, n):
        axes_degrees = [(0, 1) if (i + 1) not in sigma else (0,) for i in range(n)]
        for expts in product(*axes_degrees):
            out.append(PolyForm.covector(n, sigma, Polynomial.monomial(n, expts)))
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_tensor_span_equals_monomial_presentation(n):
    """The centered monomial basis spans the same space as the per-axis
    tensor-product definition, on the reference and on stretched cells."""
    for cell in CELLS[n]:
        for k in range(n + 1):
            mine = list(basis(Q1MINUS, k, cell))
            direct = tensor_product_presentation(k, cell)
            assert form_spans_equal(mine, direct)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_star_image_spans_dual_family(n):
    for cell in CELLS[n]:
        for k in range(n + 1):
            starred = [f.hodge() for f in basis(Q1MINUS, n - k, cell)]
            assert form_spans_equal(starred, list(basis(Q1MINUS_STAR, k, cell)))
            starred_p = [f.hodge() for f in basis(P1MINUS, n - k, cell)]
            assert form_spans_equal(starred_p, list(basis(P1MINUS_STAR, k, cell)))


def test_whitney_edge_cases():
    for n in (1, 2, 3):
        cell = CELLS[n][0]
        p1 = [PolyForm.from_scalar(Polynomial.constant(n, 1))] + [
            PolyForm.from_scalar(Polynomial.variable(n, i)) for i in range(1, n + 1)]
        assert form_spans_equal(list(basis(P1MINUS, 0, cell)), p1)
        assert form_spans_equal(list(basis(P1MINUS, n, cell)), list(basis(P0, n, cell)))
        # dual family edge cases follow by the star identity
        assert form_spans_equal(list(basis(P1MINUS_STAR, 0, cell)),
                                list(basis(P0, 0, cell)))


def test_whitney_star_alternative_presentation():
    """P1minusStar = P0 + star kappa star (P0 one degree down)."""
    for n in (2, 3):
        for cell in CELLS[n]:
            for k in range(1, n + 1):
                generated = list(basis(P0, k, cell)) + [
                    PolyForm.covector(n, gamma).koszul_delta(cell.center)
                    for gamma in multi_indices(k - 1, n)]
                assert form_spans_equal(generated, list(basis(P1MINUS_STAR, k, cell)))


def test_homogeneous_decomposition_of_tensor_family():
    for n in (2, 3):
        cell = CellBox.reference(n)
        for k in range(n + 1):
            for (sigma, tau), form in zip(basis(Q1MINUS, k, cell).labels,
                                          basis(Q1MINUS, k, cell).elements):
                parts = form.homogeneous_parts()
                assert set(parts) == {len(tau)}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_local_couple(n):
    for cell in CELLS[n]:
        for k in range(n):
            report = check_local_couple(k, n, cell)
            assert report.passed, report.to_dict()
    with pytest.raises(ValueError):
        check_local_couple(n, n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_tensor_exactness(n):
    for cell in CELLS[n]:
        for k in range(1, n + 1):
            report = check_Q_exactness(k, n, cell)
            assert report.passed, report.to_dict()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_orthogonality(n):
    for cell in CELLS[n]:
        for k in range(n + 1):
            report = check_orthogonality(n, k, cell)
            assert report.passed, report.to_dict()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_projection_pairing_identity(n):
    for cell in CELLS[n]:
        for k in range(n):
            report = check_ap_identity(k, n, cell)
            assert report.passed, report.to_dict()


def test_expand_in_span():
    cell = T2
    target = PolyForm.from_scalar(Polynomial.variable(2, 1) + Polynomial.constant(2, 2))
    coeffs = expand_in_span(list(basis(P1MINUS, 0, cell)), target)
    assert coeffs == [Fraction(2), Fraction(1), Fraction(0)]
    outside = PolyForm.from_scalar(Polynomial.variable(2, 1) * Polynomial.variable(2, 2))
    assert expand_in_span(list(basis(P1MINUS, 0, cell)), outside) is None
