"""Tensor-product Gauss-Legendre quadrature on axis-aligned boxes."""

from functools import lru_cache
from itertools import product

import numpy as np


@lru_cache(maxsize=None)
def _reference_rule(n, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    pts = np.array(list(product(nodes, repeat=n)), dtype=float)
    wts = np.array([np.prod(w) for w in product(weights, repeat=n)], dtype=float)
    return pts, wts


def box_rule(box, order):
    """Points (m, n) and weights (m,) integrating degree <= 2*order-1 per axis."""
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    n = box.n
    ref_pts, ref_wts = _reference_rule(n, order)
    center = np.array([float(c) for c in box.center])
    half = np.array([float(w) / 2.0 for w in box.widths])
    points = center + ref_pts * half
    weights = ref_wts * np.prod(half)
    return points, weights


def integrate(func, box, order):
    """Quadrature integral of a vectorized scalar function over the box."""
    points, weights = box_rule(box, order)
    return float(np.dot(weights, func(points)))


def polyform_values(form, points):
    """Component arrays {alpha: values} of a PolyForm at an (m, n) point set."""
    out = {}
    for alpha, poly in form.parts.items():
        acc = np.zeros(len(points))
        for e, c in poly.coeffs.items():
            term = np.full(len(points), float(c))
            for axis, p in enumerate(e):
                if p:
                    term *= points[:, axis] ** p
            acc += term
        out[alpha] = acc
    return out
