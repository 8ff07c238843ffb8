"""Normalizing constants and limiting laws for the 2x2 principal-minor maximum.

For the deformed GOE with diagonal variance ``xi`` the statistic
``A * (max_ij l_ij - B)`` converges to the Gumbel law when ``0 <= xi <= 2``
and to a new one-parameter law ``G_xi`` (shape ``eta`` in (0, 1)) when
``xi > 2``.  The same constants serve the Wishart case after centring by
``n`` and scaling by ``sqrt(n)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .special_functions import QuadratureSpec, adaptive_integrate, lower_incomplete_gamma

__all__ = [
    "C2",
    "GXi",
    "Gumbel",
    "LimitLaw",
    "NormConstants",
    "eta",
    "feng_consistency_delta",
    "feng_m2_cdf",
    "gumbel_cdf",
    "gumbel_pdf",
    "gumbel_quantile",
    "gxi_cdf",
    "inner_integral",
    "law_cdf",
    "law_for",
    "law_quantile",
    "norm_constants",
]

#: Constant of the m=2 Gumbel limit for the squared GOE statistic.  Equal to
#: ``-1/(2 sqrt 2) + (sqrt 2 / pi) * arcsin(2**-0.25)``, which simplifies to
#: ``arcsin(sqrt 2 - 1) / (sqrt 2 * pi)``.
C2 = -1.0 / (2.0 * math.sqrt(2.0)) + (math.sqrt(2.0) / math.pi) * math.asin(2.0 ** -0.25)

ETA_WARN = 0.999
ETA_MAX = 1.0 - 1e-6

_ASIN_SQRT2_M1 = math.asin(math.sqrt(2.0) - 1.0)


@dataclass(frozen=True)
class NormConstants:
    xi: float
    p: float
    alpha_p: float
    beta_p: float
    A: float
    B: float

    def normalize(self, stat):
        """Map a raw statistic to the limit-law scale, ``A * (stat - B)``."""
        return self.A * (np.asarray(stat, dtype=float) - self.B)

    def threshold(self, z):
        """Inverse of :meth:`normalize`: ``t_p = B + z / A``."""
        return self.B + z / self.A


def norm_constants(xi: float, p: float) -> NormConstants:
    """Scale ``A`` and location ``B`` for dimension ``p`` and diagonal variance ``xi``.

    ``p`` may be any real above ``e``; only ``log(p)`` enters, so values like
    ``1e100`` are fine.
    """
    xi = float(xi)
    if not xi >= 0:
        raise ValueError(f"xi must be >= 0, got {xi}")
    if not p > math.e:
        raise ValueError(f"p must exceed e, got {p}")
    alpha = math.sqrt(2.0 * math.log(p))
    beta = alpha - math.log(math.sqrt(2.0 * math.pi) * alpha) / alpha
    if xi < 2:
        A = 2.0 / math.sqrt(2.0 + xi) * alpha
        B = (math.sqrt(2.0 + xi) * alpha
             - math.sqrt(2.0 + xi) / 2.0
             * math.log(math.sqrt(2.0 * math.pi * (2.0 - xi)) * alpha) / alpha)
    elif xi == 2:
        A = alpha
        B = 2.0 * alpha - math.log(math.sqrt(2.0) * math.pi / _ASIN_SQRT2_M1) / alpha
    else:
        rx = math.sqrt(xi)
        A = (2.0 + rx) / (xi + rx) * alpha
        B = ((xi + 2.0 * rx + 2.0) / (2.0 + rx) * beta
             - math.log(math.sqrt(1.0 + rx) / (2.0 + rx)) / alpha)
    return NormConstants(xi=xi, p=float(p), alpha_p=alpha, beta_p=beta, A=A, B=B)


def eta(xi: float) -> float:
    """Shape parameter ``(2 + sqrt xi) / (xi + sqrt xi)`` of ``G_xi``, for ``xi > 2``."""
    if not xi > 2:
        raise ValueError(f"eta is defined for xi > 2, got {xi}")
    rx = math.sqrt(xi)
    return (2.0 + rx) / (xi + rx)


# ---------------------------------------------------------------------------
# Gumbel
# ---------------------------------------------------------------------------

def gumbel_cdf(z):
    return np.exp(-np.exp(-np.asarray(z, dtype=float)))[()]


def gumbel_pdf(z):
    z = np.asarray(z, dtype=float)
    return np.exp(-z - np.exp(-z))[()]


def gumbel_quantile(q):
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise ValueError("quantile level must lie in (0, 1)")
    return (-np.log(-np.log(q)))[()]


# ---------------------------------------------------------------------------
# G_xi
# ---------------------------------------------------------------------------

def _check_eta(eta_: float) -> None:
    if not 0 < eta_ < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta_}")
    if eta_ >= ETA_MAX:
        raise ValueError(f"eta={eta_} too close to 1; the incomplete-gamma factor diverges")
    if eta_ > ETA_WARN:
        warnings.warn(f"eta={eta_} > {ETA_WARN}: G_xi evaluation is numerically delicate",
                      RuntimeWarning, stacklevel=3)


def inner_integral(tau, eta_: float):
    """``int_0^tau s^(-1-eta) (1 - e^-s) ds`` via integration by parts.

    Uses ``(gamma(1-eta, tau) - tau^-eta (1 - e^-tau)) / eta``; the boundary
    term at 0 vanishes because the integrand behaves like ``s^-eta`` there.
    """
    _check_eta(eta_)
    tau = np.asarray(tau, dtype=float)
    if np.any(~(tau >= 0)):
        raise ValueError("tau must be >= 0")
    out = np.zeros_like(tau)
    pos = tau > 0
    tp = tau[pos]
    boundary = -np.expm1(-tp) * tp ** (-eta_)
    out[pos] = (lower_incomplete_gamma(1.0 - eta_, tp) - boundary) / eta_
    # rounding can leave a hair below zero for tiny tau
    np.maximum(out, 0.0, out=out)
    return out[()]


_Y_LO = -6.0        # Lambda(-6) = exp(-e^6) ~ 1e-175
_Y_HI_CAP = 40.0    # 1 - Lambda(40) < e^-40
_RIGHT_LOG_TAU = math.log(60.0)  # right-tail mass <= exp(-60)


def gxi_integration_bounds(z: float, eta_: float) -> tuple[float, float]:
    """Outer integration window ``[y_lo, y_hi]`` for :func:`gxi_cdf`.

    The integrand is bounded by ``lambda(y)`` and by
    ``exp(-e^((y-z)/eta)) * lambda(y)``.  Left of ``-6`` the mass is at most
    ``Lambda(-6) < 1e-170``; right of ``y_hi = min(40, z + eta*ln 60)`` it is
    at most ``max(e^-40, e^-60)``.
    """
    return _Y_LO, min(_Y_HI_CAP, z + eta_ * _RIGHT_LOG_TAU)


def _gxi_integrand(z: float, eta_: float):
    log_eta = math.log(eta_)

    def f(y):
        y = np.asarray(y, dtype=float)
        tau = np.exp((y - z) / eta_)
        inner = inner_integral(tau, eta_)
        with np.errstate(divide="ignore"):
            log_pen = log_eta - z + np.log(inner)
        pen = np.exp(log_pen)
        return np.exp(-tau - pen - y - np.exp(-y))

    return f


def gxi_cdf(z: float, eta_: float, spec: QuadratureSpec | None = None) -> float:
    """Distribution function of the ``xi > 2`` limit law with shape ``eta``.

    ``G(z) = int exp(-tau(y) - eta e^-z I(tau(y))) lambda(y) dy`` with
    ``tau(y) = exp((y - z)/eta)`` and ``I`` from :func:`inner_integral`.
    """
    _check_eta(eta_)
    z = float(z)
    lo, hi = gxi_integration_bounds(z, eta_)
    if hi <= lo:
        return 0.0
    f = _gxi_integrand(z, eta_)
    mid = min(max(z, lo), hi)
    total = 0.0
    for a, b in ((lo, mid), (mid, hi)):
        if b > a:
            total += adaptive_integrate(f, a, b, spec)
    return min(max(total, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Law objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gumbel:
    name = "gumbel"

    def cdf(self, z):
        return gumbel_cdf(z)

    def quantile(self, q):
        return gumbel_quantile(q)

    def describe(self) -> dict:
        return {"family": "gumbel"}


@dataclass(frozen=True)
class GXi:
    eta: float
    spec: QuadratureSpec = QuadratureSpec()

    name = "gxi"

    def __post_init__(self):
        _check_eta(self.eta)

    def cdf(self, z):
        if np.ndim(z):
            return np.array([gxi_cdf(v, self.eta, self.spec) for v in np.ravel(z)]).reshape(np.shape(z))
        return gxi_cdf(z, self.eta, self.spec)

    def quantile(self, q, tol: float = 1e-12):
        return _bisect_quantile(lambda v: gxi_cdf(v, self.eta, self.spec), q, tol)

    def describe(self) -> dict:
        return {"family": "gxi", "eta": self.eta}

    @classmethod
    def from_xi(cls, xi: float) -> GXi:
        return cls(eta(xi))


LimitLaw = Gumbel | GXi


def law_for(xi: float) -> LimitLaw:
    """Gumbel for ``xi`` in [0, 2] (inclusive), ``G_xi`` beyond."""
    if not xi >= 0:
        raise ValueError(f"xi must be >= 0, got {xi}")
    return Gumbel() if xi <= 2 else GXi(eta(xi))


def law_cdf(law: LimitLaw, z):
    return law.cdf(z)


def law_quantile(law: LimitLaw, q):
    if not 0 < q < 1:
        raise ValueError("quantile level must lie in (0, 1)")
    return law.quantile(q)


def _bisect_quantile(cdf, q: float, tol: float, max_iter: int = 400) -> float:
    if not 0 < q < 1:
        raise ValueError("quantile level must lie in (0, 1)")
    z0 = float(gumbel_quantile(q))
    lo, hi = z0 - 1.0, z0 + 1.0
    step = 2.0
    while cdf(lo) > q:
        lo -= step
        step *= 2
        if lo < -1e4:
            raise ArithmeticError(f"could not bracket quantile {q} from below")
    step = 2.0
    while cdf(hi) < q:
        hi += step
        step *= 2
        if hi > 1e4:
            raise ArithmeticError(f"could not bracket quantile {q} from above")
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        if cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Cross-check against the squared-statistic form at xi = 2
# ---------------------------------------------------------------------------

def feng_m2_cdf(t, p: float):
    """``exp(-C2 * exp(-(t^2 - 8 ln p) / 4))``: the GOE m=2 limit in squared form."""
    if not p > math.e:
        raise ValueError(f"p must exceed e, got {p}")
    t = np.asarray(t, dtype=float)
    return np.exp(-C2 * np.exp(-(t * t - 8.0 * math.log(p)) / 4.0))[()]


def feng_consistency_delta(p: float, z: float) -> float:
    """``|Lambda(z) - feng_m2_cdf(B + z/A, p)|`` with the ``xi = 2`` constants."""
    nc = norm_constants(2.0, p)
    return float(abs(gumbel_cdf(z) - feng_m2_cdf(nc.threshold(z), p)))


# ---------------------------------------------------------------------------
# Misc
# ---------------------------------------------------------------------------

def law_from_description(desc: dict) -> LimitLaw:
    if desc.get("family") == "gumbel":
        return Gumbel()
    if desc.get("family") == "gxi":
        return GXi(float(desc["eta"]))
    raise ValueError(f"unknown law description {desc!r}")

