"""Increasing multi-indices and the sign algebra of basis covectors.

A multi-index is a strictly increasing tuple of axis labels in ``1..n``
(possibly empty).  It names a basis covector ``dx^alpha``.  Everything
downstream (form components, space bases, matrix layouts) is numbered by
the lexicographic enumeration produced here, so the ordering is part of
the contract.
"""

from itertools import combinations

#: Largest ambient dimension accepted by the CLI.  Kept small on purpose:
#: basis sizes grow like C(n,k)*2^n and the exact arithmetic suites are
#: meant for desk-scale dimensions.
MAX_DIM = 6


def is_multi_index(alpha, n):
    """True if alpha is a strictly increasing tuple with entries in 1..n."""
    return all(isinstance(a, int) for a in alpha) and \
        all(alpha[i] < alpha[i + 1] for i in range(len(alpha) - 1)) and \
        (len(alpha) == 0 or (alpha[0] >= 1 and alpha[-1] <= n))


def multi_indices(k, n):
    """All strictly increasing k-tuples over 1..n, in lexicographic order.

    There are C(n, k) of them; ``multi_indices(0, n)`` is ``[()]``.
    """
    if k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    return [tuple(c) for c in combinations(range(1, n + 1), k)]


def complement(alpha, n):
    """The increasing tuple of axes in 1..n not contained in alpha."""
    present = set(alpha)
    return tuple(i for i in range(1, n + 1) if i not in present)


def wedge_sign(alpha, beta):
    """Sign and merged index of ``dx^alpha ^ dx^beta``.

    Returns ``(s, gamma)`` with ``dx^alpha ^ dx^beta = s * dx^gamma`` and
    ``gamma = sorted(alpha + beta)``, or ``(0, None)`` if the tuples share
    an axis.  The sign counts the transpositions needed to interleave the
    two increasing tuples.
    """
    i = j = 0
    inversions = 0
    merged = []
    while i < len(alpha) and j < len(beta):
        if alpha[i] == beta[j]:
            return 0, None
        if alpha[i] < beta[j]:
            merged.append(alpha[i])
            i += 1
        else:
            # beta[j] jumps over the remaining entries of alpha
            inversions += len(alpha) - i
            merged.append(beta[j])
            j += 1
    merged.extend(alpha[i:])
    merged.extend(beta[j:])
    return (-1) ** inversions, tuple(merged)


def hodge_sign(alpha, n):
    """Sign s with ``star dx^alpha = s * dx^(alpha^c)``.

    Convention: ``dx^alpha ^ star dx^alpha = dx^1 ^ ... ^ dx^n`` (Euclidean
    metric, standard orientation), hence ``s = wedge_sign(alpha, alpha^c)``.
    """
    s, _ = wedge_sign(alpha, complement(alpha, n))
    return s
