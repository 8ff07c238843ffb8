"""Largest eigenvalues of 2x2 principal minors and their maximum.

``l_ij = sqrt(b^2 + ((a - d)/2)^2) + (a + d)/2`` is the top eigenvalue of
``[[a, b], [b, d]]``.  The statistics here scan every pair ``i < j`` once;
ties in the maximum go to the first pair in row-major order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .ensembles import (
    DEFAULT_MAX_ENTRIES,
    EntryDistribution,
    SeedSpec,
    draw_goe_diag,
    draw_wishart_X,
    iter_goe_offdiag_blocks,
)
from .limit_laws import norm_constants

__all__ = [
    "DiagMaxResult",
    "PairMaxResult",
    "diag_max",
    "goe_pair_max",
    "pair_max_from_gram",
    "top_eig_2x2",
    "wishart_pair_max",
]

DEFAULT_GRAM_BLOCK = 64


@dataclass(frozen=True)
class PairMaxResult:
    raw_max: float
    argmax_pair: tuple[int, int]
    normalized: float


@dataclass(frozen=True)
class DiagMaxResult:
    raw_max: float
    normalized: float


_SPLIT = 134217729.0  # 2^27 + 1


@numba.njit(cache=True, nogil=True, inline="always")
def _two_prod(x, y):
    # Dekker: x * y == prod + err exactly (no FMA needed)
    prod = x * y
    c = _SPLIT * x
    xh = c - (c - x)
    xl = x - xh
    c = _SPLIT * y
    yh = c - (c - y)
    yl = y - yh
    err = ((xh * yh - prod) + (xh * yl + xl * yh)) + xl * yl
    return prod, err


@numba.njit(cache=True, nogil=True, inline="always")
def _top_eig(a, d, b):
    h = 0.5 * (a - d)
    s = math.sqrt(b * b + h * h)
    m = 0.5 * (a + d)
    if m >= 0.0:
        return s + m
    # s + m cancels here; use l1 = det / l2 with an exactly rounded det
    p1, e1 = _two_prod(a, d)
    p2, e2 = _two_prod(b, b)
    return ((p1 - p2) + (e1 - e2)) / (m - s)


@numba.vectorize(["float64(float64, float64, float64)"], cache=True)
def _top_eig_ufunc(a, d, b):
    return _top_eig(a, d, b)


def top_eig_2x2(a, d, b):
    """Largest eigenvalue of the symmetric matrix ``[[a, b], [b, d]]``.

    Works elementwise on arrays and is accurate to a few ulp relative to
    the eigenvalue itself.  When ``a + d < 0`` the direct formula cancels,
    so the value is taken as ``det / l2`` instead.  Squares are formed
    directly (``hypot`` halves the speed of the pair scan), so entries must
    stay inside roughly ``1e-150 .. 1e150`` in magnitude.
    """
    out = _top_eig_ufunc(np.asarray(a, dtype=float), np.asarray(d, dtype=float),
                         np.asarray(b, dtype=float))
    return out[()] if isinstance(out, np.ndarray) else float(out)


@numba.njit(cache=True, nogil=True)
def _scan_rows(diag, values, start, stop, best, bi, bj):
    # shares _top_eig with top_eig_2x2 so results agree bit for bit
    p = diag.shape[0]
    k = 0
    for i in range(start, stop):
        a = diag[i]
        for j in range(i + 1, p):
            d = diag[j]
            b = values[k]
            k += 1
            val = _top_eig(a, d, b)
            if val > best:
                best, bi, bj = val, i, j
    return best, bi, bj


def goe_pair_max(xi: float, p: int, seed: SeedSpec) -> PairMaxResult:
    """Maximum over ``i < j`` of the top eigenvalue of each 2x2 minor of a deformed GOE.

    Off-diagonal entries are streamed block by block and never stored, so
    memory is O(p) beyond one block.  ``normalized`` is ``A * (raw - B)``
    with the constants for ``(xi, p)``, NaN for ``p = 2`` where they are undefined.
    """
    diag = draw_goe_diag(xi, p, seed)
    best, bi, bj = -math.inf, -1, -1
    for start, stop, values in iter_goe_offdiag_blocks(p, seed):
        best, bi, bj = _scan_rows(diag, values, start, stop, best, bi, bj)
    normalized = float(norm_constants(xi, p).normalize(best)) if p > math.e else math.nan
    return PairMaxResult(float(best), (int(bi), int(bj)), normalized)


def _block_candidate(w_ii, w_jj, w_ij, row0, col0, diagonal_block):
    vals = _top_eig_ufunc(w_ii[:, None], w_jj[None, :], w_ij)
    if diagonal_block:
        vals = np.where(np.triu(np.ones(vals.shape, dtype=bool), k=1), vals, -np.inf)
    # np.argmax returns the first maximum in row-major order within the block
    k = int(np.argmax(vals))
    r, c = divmod(k, vals.shape[1])
    return float(vals[r, c]), (row0 + r, col0 + c)


def pair_max_from_gram(gram_block_fn, diag: np.ndarray, p: int, block: int = DEFAULT_GRAM_BLOCK):
    """Scan all pairs given a function returning Gram blocks ``W[I, J]``.

    Returns ``(raw_max, (i, j))``.  Candidates from different blocks are
    merged with ties resolved toward the lexicographically smaller pair,
    which equals first-encountered in a global row-major scan.
    """
    best, arg = -math.inf, (-1, -1)
    for r0 in range(0, p, block):
        r1 = min(r0 + block, p)
        for c0 in range(r0, p, block):
            c1 = min(c0 + block, p)
            w_ij = gram_block_fn(r0, r1, c0, c1)
            val, pair = _block_candidate(diag[r0:r1], diag[c0:c1], w_ij, r0, c0, c0 == r0)
            if val > best or (val == best and pair < arg):
                best, arg = val, pair
    return best, arg


def wishart_pair_max(n: int, p: int, dist: EntryDistribution, seed: SeedSpec,
                     block: int = DEFAULT_GRAM_BLOCK,
                     max_entries: int = DEFAULT_MAX_ENTRIES,
                     X: np.ndarray | None = None) -> PairMaxResult:
    """Maximum 2x2-minor top eigenvalue of ``W = X^T X``.

    Gram entries are formed from column blocks of width ``block``; only the
    two blocks of the current pair take part in each product.
    ``normalized`` is ``A * ((raw - n)/sqrt(n) - B)`` with ``xi`` taken from
    ``dist``.  Pass ``X`` to evaluate a fixed data matrix instead of
    sampling one.
    """
    if X is None:
        X = draw_wishart_X(n, p, dist, seed, max_entries=max_entries)
    else:
        X = np.asarray(X, dtype=float)
        n, p = X.shape
    diag = np.einsum("ij,ij->j", X, X)

    def gram(r0, r1, c0, c1):
        return X[:, r0:r1].T @ X[:, c0:c1]

    best, arg = pair_max_from_gram(gram, diag, p, block)
    nc = norm_constants(dist.xi, p) if p > math.e else None
    centred = (best - n) / math.sqrt(n)
    normalized = float(nc.normalize(centred)) if nc else math.nan
    return PairMaxResult(float(best), arg, normalized)


def diag_max(xi: float, p: int, seed: SeedSpec) -> DiagMaxResult:
    """Maximum of the ``p`` diagonal entries, normalized as ``alpha_p (max/sqrt(xi) - beta_p)``.

    Uses the same diagonal stream as :func:`goe_pair_max`.  For ``p < 3`` the
    constants are undefined and ``normalized`` is NaN.
    """
    if not xi > 0:
        raise ValueError("diag_max needs xi > 0")
    raw = float(np.max(draw_goe_diag(xi, p, seed)))
    if p > math.e:
        nc = norm_constants(xi, p)
        normalized = nc.alpha_p * (raw / math.sqrt(xi) - nc.beta_p)
    else:
        normalized = math.nan
    return DiagMaxResult(raw, float(normalized))
