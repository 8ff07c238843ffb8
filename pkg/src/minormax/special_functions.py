"""Scalar special functions and adaptive quadrature.

The normal-tail functions are built on the scaled complementary error
function so that the right tail keeps full relative accuracy far past the
point where ``1 - cdf`` has cancelled to zero.  Everything here is a pure
function of its arguments and accepts numpy arrays where noted.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "QuadratureError",
    "QuadratureSpec",
    "adaptive_integrate",
    "integrate_left_singular",
    "log_std_normal_pdf",
    "log_std_normal_sf",
    "log_std_normal_cdf",
    "lower_incomplete_gamma",
    "std_normal_cdf",
    "std_normal_pdf",
    "std_normal_sf",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)


class QuadratureError(RuntimeError):
    """Adaptive quadrature hit its depth cap or saw a non-finite value."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`adaptive_integrate`.

    The estimate is accepted once the summed error bound drops below
    ``max(abs_tol, rel_tol * |result|)``.  ``max_depth`` caps the number of
    bisections any single subinterval may undergo.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    max_depth: int = 40

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer")


# ---------------------------------------------------------------------------
# Standard normal
# ---------------------------------------------------------------------------

def std_normal_pdf(x):
    """Standard normal density.

    Flushes to exactly 0.0 once ``x**2 / 2`` exceeds the double range
    (|x| > ~38.6); use :func:`log_std_normal_pdf` beyond that.
    """
    return np.exp(log_std_normal_pdf(x))


def log_std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    out = -0.5 * x * x - _LOG_SQRT_2PI
    return out if out.ndim else float(out)


def std_normal_cdf(x):
    x = np.asarray(x, dtype=float)
    out = 0.5 * special.erfc(-x / _SQRT2)
    return out if out.ndim else float(out)


def std_normal_sf(x):
    """Survival function ``1 - Phi(x)``, accurate deep in the right tail.

    For ``x > 0`` this is ``erfcx(x/sqrt2) * exp(-x^2/2) / 2``, which keeps
    full relative precision until the result itself underflows.
    """
    x = np.asarray(x, dtype=float)
    pos = x > 0
    out = np.empty_like(x)
    xp = x[pos]
    out[pos] = 0.5 * special.erfcx(xp / _SQRT2) * np.exp(-0.5 * xp * xp)
    out[~pos] = 0.5 * special.erfc(x[~pos] / _SQRT2)
    return out if out.ndim else float(out)


def log_std_normal_sf(x):
    """``log(1 - Phi(x))`` without underflow for large positive x."""
    x = np.asarray(x, dtype=float)
    pos = x > 0
    out = np.empty_like(x)
    xp = x[pos]
    out[pos] = np.log(0.5 * special.erfcx(xp / _SQRT2)) - 0.5 * xp * xp
    out[~pos] = np.log1p(-0.5 * special.erfc(-x[~pos] / _SQRT2))
    return out if out.ndim else float(out)


def log_std_normal_cdf(x):
    return log_std_normal_sf(-np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# Incomplete gamma
# ---------------------------------------------------------------------------

def lower_incomplete_gamma(a, x):
    """Unregularised lower incomplete gamma ``gamma(a, x)`` for ``a`` in (0, 1].

    Backed by ``scipy.special.gammainc`` (regularised) times ``Gamma(a)``.
    """
    a_arr = np.asarray(a, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~((a_arr > 0) & (a_arr <= 1))):
        raise ValueError("lower_incomplete_gamma requires 0 < a <= 1")
    if np.any(~(x_arr >= 0)):
        raise ValueError("lower_incomplete_gamma requires x >= 0")
    out = special.gammainc(a_arr, x_arr) * special.gamma(a_arr)
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod (7, 15)
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
# 15 abscissae on [-1, 1] ordered left to right, with matching weights.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:15:2] = _WG[:3][::-1]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    fx = np.asarray(f(center + half * _NODES), dtype=float)
    if fx.shape != (15,):
        fx = np.broadcast_to(fx, (15,)).astype(float)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError(f"integrand not finite on [{a!r}, {b!r}]")
    kron = float(np.dot(_KW, fx))
    gauss = float(np.dot(_GW, fx))
    mean = 0.5 * kron
    resabs = float(np.dot(_KW, np.abs(fx))) * abs(half)
    resasc = float(np.dot(_KW, np.abs(fx - mean))) * abs(half)
    err = abs((kron - gauss) * half)
    # QUADPACK's qk15 error heuristic
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _TINY / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    return kron * half, err


def adaptive_integrate(f, a, b, spec: QuadratureSpec | None = None,
                       vectorized: bool = True) -> float:
    """Integrate ``f`` over ``[a, b]`` by globally adaptive G7-K15 bisection.

    The subinterval with the largest error estimate is bisected until the
    total estimate is within ``max(abs_tol, rel_tol * |I|)``.  Ties are
    broken by creation order, so the result is bit-reproducible.

    ``f`` is called with a length-15 array of abscissae unless
    ``vectorized`` is False, in which case it is called pointwise.
    Endpoint singularities must be transformed away by the caller (see
    :func:`integrate_left_singular`).

    Raises
    ------
    QuadratureError
        If ``f`` returns a non-finite value or an interval that still needs
        refinement is already ``spec.max_depth`` bisections deep.
    """
    spec = spec or QuadratureSpec()
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if a > b:
        raise ValueError("require a <= b")
    if a == b:
        return 0.0
    if not vectorized:
        g = f
        f = lambda xs: np.array([g(float(x)) for x in xs])  # noqa: E731

    total, err = _gk15(f, a, b)
    heap = [(-err, 0, a, b, total, err, 0)]
    counter = 1
    total_err = err
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        _, _, lo, hi, val, e, depth = heapq.heappop(heap)
        if depth >= spec.max_depth:
            raise QuadratureError(
                f"no convergence on [{a!r}, {b!r}] within max_depth="
                f"{spec.max_depth} (error estimate {total_err:.3g})")
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += v1 + v2 - val
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1, depth + 1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2, e2, depth + 1))
        counter += 2
    # re-sum in creation order to avoid drift from incremental updates
    return float(math.fsum(item[4] for item in sorted(heap, key=lambda t: t[1])))


def integrate_left_singular(f, a, b, spec: QuadratureSpec | None = None,
                            power: float = 2.0) -> float:
    """Integrate ``f`` with an integrable singularity at the left endpoint.

    Substitutes ``s = a + (b - a) * u**power`` so that
    ``int_a^b f(s) ds = int_0^1 f(s(u)) * power * (b - a) * u**(power-1) du``.
    A singularity like ``(s - a)**(-beta)`` becomes bounded once
    ``power * (1 - beta) >= 1``; ``power=2`` removes ``s**(-1/2)`` exactly.
    """
    width = b - a

    def g(u):
        u = np.asarray(u, dtype=float)
        return f(a + width * u ** power) * (power * width) * u ** (power - 1.0)

    return adaptive_integrate(g, 0.0, 1.0, spec)
