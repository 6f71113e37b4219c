"""Symmetric pseudoinverses (floating and exact) and exact rational row reduction."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = [
    "AsymmetricMatrixError",
    "sym_pinv",
    "numeric_rank",
    "exact_rank",
    "exact_rref",
    "exact_pinv",
    "exact_matmul",
    "subspace_intersection_dim",
]

DEFAULT_TOL = 1e-9


class AsymmetricMatrixError(ValueError):
    pass


def sym_pinv(mat, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric matrix by eigendecomposition.

    Eigenvalues with ``|lambda| < tol`` are treated as exact zeros, so the
    result vanishes on the (numerical) kernel of ``mat``.

    Raises
    ------
    AsymmetricMatrixError
        If ``mat`` differs from its transpose by more than ``tol``.
    """
    a = np.asarray(mat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("sym_pinv needs a square matrix")
    if a.size and np.max(np.abs(a - a.T)) > tol:
        raise AsymmetricMatrixError("matrix is not symmetric within tolerance")
    a = 0.5 * (a + a.T)
    w, v = np.linalg.eigh(a)
    keep = np.abs(w) >= tol
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    out = (v * inv) @ v.T
    return 0.5 * (out + out.T)


def numeric_rank(mat, tol: float = DEFAULT_TOL) -> int:
    a = np.asarray(mat, dtype=float)
    if a.size == 0:
        return 0
    w = np.linalg.eigvalsh(0.5 * (a + a.T))
    return int(np.sum(np.abs(w) >= tol))


def exact_rref(rows):
    """Reduced row echelon form over Q.

    Returns ``(rref_rows, pivot_columns)``; input is a list of equal-length
    sequences of rationals and is not modified.
    """
    mat = [[Fraction(x) for x in r] for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def exact_rank(rows) -> int:
    """Rank over Q of a sparse or dense matrix.

    ``rows`` is either a list of dense sequences or a list of dicts
    ``{column: value}``. Uses sparse elimination with Fraction arithmetic.
    """
    sparse = []
    for r in rows:
        if isinstance(r, dict):
            d = {k: Fraction(v) for k, v in r.items() if v}
        else:
            d = {k: Fraction(v) for k, v in enumerate(r) if v}
        if d:
            sparse.append(d)
    pivots: dict[int, dict] = {}
    rank = 0
    for row in sparse:
        row = dict(row)
        while row:
            col = min(row)
            prow = pivots.get(col)
            if prow is None:
                inv = 1 / row[col]
                pivots[col] = {k: v * inv for k, v in row.items()}
                rank += 1
                break
            f = row[col]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return rank


def subspace_intersection_dim(vectors, allowed_coords) -> int:
    """Dimension of span(vectors) intersected with the coordinate subspace ``allowed_coords``.

    ``vectors`` are sparse dicts. The intersection is the kernel of the
    projection onto the excluded coordinates restricted to the span, so its
    dimension is ``rank(V) - rank(V restricted to excluded coords)``.
    """
    allowed = set(allowed_coords)
    full = exact_rank(vectors)
    excluded = [{k: v for k, v in vec.items() if k not in allowed} for vec in vectors]
    return full - exact_rank(excluded)


def exact_matmul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][l] * b[l][j] for l in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def _transpose(a):
    return [list(r) for r in zip(*a)]


def _exact_inverse(a):
    n = len(a)
    aug = [list(map(Fraction, a[i])) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, piv = exact_rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [r[n:] for r in red]


def exact_pinv(a):
    """Exact Moore-Penrose pseudoinverse of a rational matrix.

    Uses the full-rank factorization ``A = C F`` with ``F`` the nonzero rows
    of rref(A) and ``C`` the pivot columns of A:
    ``A+ = F^T (F F^T)^-1 (C^T C)^-1 C^T``.
    """
    a = [[Fraction(x) for x in r] for r in a]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    red, piv = exact_rref(a)
    if not piv:
        return [[Fraction(0)] * rows for _ in range(cols)]
    f = red
    c = [[a[i][j] for j in piv] for i in range(rows)]
    ft = _transpose(f)
    ct = _transpose(c)
    left = exact_matmul(ft, _exact_inverse(exact_matmul(f, ft)))
    right = exact_matmul(_exact_inverse(exact_matmul(ct, c)), ct)
    return exact_matmul(left, right)
