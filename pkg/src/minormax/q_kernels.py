"""Deterministic evaluation of the pair-exceedance kernels and their asymptotics.

Conditioning on the largest diagonal entry leaves the remaining standardized
diagonal entries i.i.d. with the truncated normal density
``phi(u) / Phi(c)`` on ``(-inf, c]``.  The kernels average the pair
exceedance probability

    q(x, y; t) = P(z^2 > (t - sqrt(xi) x) (t - sqrt(xi) y))

against that density once (``q_x``) or twice (``q_tp``).  Because only
``log p`` enters, everything can be evaluated at ``p = 1e100`` where the
kernels are ~1e-200.  Intermediate integrands fall far below the double
range there, so all kernels are computed in log space and integrated after
rescaling by their peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .limit_laws import eta as eta_of
from .limit_laws import inner_integral, norm_constants
from .special_functions import (
    QuadratureSpec,
    adaptive_integrate,
    log_std_normal_cdf,
    log_std_normal_pdf,
    log_std_normal_sf,
)

__all__ = [
    "Diagnostic",
    "KernelContext",
    "SeriesCheck",
    "chores_limits",
    "kernel_context",
    "lemma_diagnostics",
    "log_predict_q_moment",
    "log_predict_q_tp",
    "log_predict_q_x",
    "log_q_moment",
    "log_q_tp",
    "log_q_x",
    "log_q_xy",
    "predict_q_moment",
    "predict_q_tp",
    "predict_q_x",
    "q_moment",
    "q_tp",
    "q_x",
    "q_xy",
    "series_gamma",
    "series_identity_check",
]

KERNEL_SPEC = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-10, max_depth=40)

_LOG2 = math.log(2.0)
# integrand values below exp(-_DROP) relative to the peak are ignored
_DROP = 46.0
_STEP = 0.25


@dataclass(frozen=True)
class KernelContext:
    """Frozen inputs ``(xi, p, y, z)`` and the derived thresholds.

    ``t_p = B + z/A`` is the threshold on the raw statistic and
    ``c_p = beta_p + y/alpha_p`` the truncation point of the diagonal.
    ``r`` is the limit of ``t_p / sqrt(2 log p)``.
    """

    xi: float
    p: float
    y: float
    z: float
    t_p: float
    c_p: float
    alpha_p: float
    beta_p: float
    r: float
    log_p: float = field(repr=False, default=math.nan)

    @property
    def sqrt_xi(self) -> float:
        return math.sqrt(self.xi)

    def x_bounds(self, b_p: float | None = None) -> tuple[float, float]:
        """``(x_p, xbar_p)``: left edge of the bulk regime and right edge of the small-x regime."""
        b = math.log(self.c_p) if b_p is None else b_p
        centre = (self.t_p - 2.0 * self.c_p / self.sqrt_xi) / self.sqrt_xi
        return centre + b, centre - b


def _limit_ratio(xi: float) -> float:
    rx = math.sqrt(xi)
    if xi <= 2:
        return math.sqrt(2.0 + xi)
    return (xi + 2.0 * rx + 2.0) / (2.0 + rx)


def kernel_context(xi: float, p: float, y: float = 0.0, z: float = 0.0,
                   t_p: float | None = None) -> KernelContext:
    """Build a context with the normalizing constants for ``(xi, p)``.

    ``t_p`` defaults to ``B + z/A``; a custom ``t_p`` sets ``r`` to
    ``t_p / alpha_p``.
    """
    if not xi > 0:
        raise ValueError("kernel contexts need xi > 0")
    nc = norm_constants(xi, p)
    c = nc.beta_p + y / nc.alpha_p
    if t_p is None:
        t = nc.threshold(z)
        r = _limit_ratio(xi)
    else:
        t = float(t_p)
        r = t / nc.alpha_p
    rx = math.sqrt(xi)
    if not t - rx * c > 0:
        raise ValueError(f"t_p - sqrt(xi) c_p = {t - rx * c:.4g} must be positive")
    if p >= 1e6 and not rx < t / c < rx + 2.0 / rx:
        raise ValueError(f"t_p/c_p = {t / c:.4g} outside ({rx:.4g}, {rx + 2 / rx:.4g})")
    return KernelContext(xi=float(xi), p=float(p), y=float(y), z=float(z), t_p=t, c_p=c,
                         alpha_p=nc.alpha_p, beta_p=nc.beta_p, r=r, log_p=math.log(p))


# ---------------------------------------------------------------------------
# Pair kernel
# ---------------------------------------------------------------------------

def log_q_xy(x, y, t: float, xi: float):
    """``log q(x, y; t)``; zero where the product is non-positive."""
    rx = math.sqrt(xi)
    prod = (t - rx * np.asarray(x, dtype=float)) * (t - rx * np.asarray(y, dtype=float))
    prod = np.asarray(prod)
    out = np.zeros(prod.shape)
    pos = prod > 0
    out[pos] = _LOG2 + log_std_normal_sf(np.sqrt(prod[pos]))
    return out[()]


def q_xy(x, y, t: float, xi: float):
    """``2 * sf(sqrt((t - sqrt(xi) x)(t - sqrt(xi) y)))`` if the product is positive, else 1."""
    return np.exp(log_q_xy(x, y, t, xi))[()]


# ---------------------------------------------------------------------------
# Integration helpers
# ---------------------------------------------------------------------------

def _log_integrate_scaled(log_f, a: float, b: float, log_scale: float,
                          spec: QuadratureSpec, breaks=()) -> float:
    """``log int_a^b exp(log_f)`` computed as ``log_scale + log int exp(log_f - log_scale)``."""
    pts = [a] + sorted(x for x in breaks if a < x < b) + [b]

    def f(u):
        return np.exp(log_f(u) - log_scale)

    total = math.fsum(adaptive_integrate(f, lo, hi, spec) for lo, hi in zip(pts[:-1], pts[1:]))
    return log_scale + math.log(total) if total > 0 else -math.inf


def _scan_window(log_f, c: float, lo_limit: float):
    """Evaluate ``log_f`` on a grid descending from ``c``; return (window_lo, peak)."""
    grid = np.arange(c, lo_limit - _STEP, -_STEP)
    vals = np.asarray(log_f(grid), dtype=float)
    peak = float(np.max(vals))
    keep = np.nonzero(vals > peak - _DROP)[0]
    lo = float(grid[min(keep[-1] + 2, len(grid) - 1)])
    return lo, peak, grid, vals


class _LogQxCache:
    """Memoised ``log q_x`` for the lifetime of one top-level kernel call."""

    def __init__(self, ctx: KernelContext, spec: QuadratureSpec):
        self.ctx, self.spec = ctx, spec
        self._memo: dict[float, float] = {}

    def __call__(self, xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        out = np.empty(xs.shape)
        for k, x in enumerate(xs):
            key = float(x)
            v = self._memo.get(key)
            if v is None:
                v = self._memo[key] = log_q_x(key, self.ctx, self.spec)
            out[k] = v
        return out


# ---------------------------------------------------------------------------
# One- and two-fold truncated-normal averages
# ---------------------------------------------------------------------------

def log_q_x(x: float, ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    """``log E q(x, zbar; t_p)`` with ``zbar`` truncated normal on ``(-inf, c_p]``."""
    c, t, rx = ctx.c_p, ctx.t_p, ctx.sqrt_xi
    if x > c:
        raise ValueError(f"q_x needs x <= c_p ({x} > {c})")
    log_phi_c = log_std_normal_cdf(c)

    def log_f(u):
        return log_q_xy(x, u, t, ctx.xi) + log_std_normal_pdf(u)

    # exponent ~ -(t - rx x)(t - rx u)/2 - u^2/2: a unit-variance bump at u*
    u_star = min(c, 0.5 * rx * (t - rx * x))
    local = np.clip(u_star + np.array([-1.0, 0.0, 1.0]), None, c)
    peak = float(np.max(log_f(local)))
    lo = u_star - 14.0
    while log_f(lo) > peak - _DROP:
        lo -= 8.0
    hi = c
    if u_star + 14.0 < c and log_f(u_star + 14.0) < peak - _DROP:
        hi = u_star + 14.0
    val = _log_integrate_scaled(log_f, lo, hi, peak, spec, breaks=(u_star,))
    return val - log_phi_c


def q_x(x: float, ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    return math.exp(log_q_x(x, ctx, spec))


def _log_average(log_h, ctx: KernelContext, spec: QuadratureSpec) -> float:
    """``log E h(zbar)`` given ``log h`` on ``(-inf, c_p]``."""
    c = ctx.c_p

    def log_f(u):
        return log_h(u) + log_std_normal_pdf(u)

    lo, peak, _, _ = _scan_window(log_f, c, -c - 20.0)
    breaks = np.arange(c - 2.0, lo, -2.0)
    val = _log_integrate_scaled(log_f, lo, c, peak, spec, breaks=tuple(breaks))
    return val - log_std_normal_cdf(c)


def log_q_tp(ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC, _cache=None) -> float:
    cache = _cache or _LogQxCache(ctx, spec)
    return _log_average(cache, ctx, spec)


def q_tp(ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    """``E q(zbar_1, zbar_2; t_p)``: the double truncated-normal average."""
    return math.exp(log_q_tp(ctx, spec))


def log_q_moment(j: int, ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC,
                 _cache=None) -> float:
    if j < 1:
        raise ValueError("moment order must be >= 1")
    cache = _cache or _LogQxCache(ctx, spec)
    return _log_average(lambda u: j * cache(u), ctx, spec)


def q_moment(j: int, ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    """``E[q_x(zbar)^j]``; ``j = 1`` is :func:`q_tp`."""
    return math.exp(log_q_moment(j, ctx, spec))


# ---------------------------------------------------------------------------
# Closed-form asymptotics
# ---------------------------------------------------------------------------

def _quadratic_exponent(x, ctx: KernelContext):
    xi, t, rx = ctx.xi, ctx.t_p, ctx.sqrt_xi
    return (4.0 - xi) / 4.0 * t * t - xi * xi / 4.0 * x * x - (2.0 - xi) * rx / 2.0 * x * t


def log_predict_q_x(x, ctx: KernelContext, regime: str, b_p: float | None = None,
                    check: bool = True):
    """Log of the leading-order approximation to ``q_x`` in one of three regimes.

    ``upper`` is an upper bound valid for every ``x <= c_p``; ``bulk`` holds
    on ``[x_p, c_p]``; ``small_x`` holds for ``x <= xbar_p``.
    """
    x = np.asarray(x, dtype=float)
    xi, t, c, rx = ctx.xi, ctx.t_p, ctx.c_p, ctx.sqrt_xi
    x_p, xbar_p = ctx.x_bounds(b_p)
    tol = 1e-9 * max(1.0, abs(c))
    if check and np.any(x > c + tol):
        raise ValueError("x must not exceed c_p")
    dx = t - rx * x
    dc = t - rx * c
    if regime == "upper":
        cbar = c - 0.5 * rx * dx
        return (_LOG2 - 0.5 * math.log(2 * math.pi) - 0.5 * np.log(dx) - 0.5 * math.log(dc)
                + log_std_normal_cdf(cbar) - 0.5 * _quadratic_exponent(x, ctx))[()]
    if regime == "bulk":
        if check and np.any(x < x_p - tol):
            raise ValueError(f"bulk regime needs x >= x_p = {x_p:.6g}")
        inner = (1.0 - 0.5 * xi) * t + 0.5 * xi ** 1.5 * x
        return (_LOG2 - 0.5 * _quadratic_exponent(x, ctx)
                - 0.5 * math.log(2 * math.pi) - 0.5 * np.log(dx * inner))[()]
    if regime == "small_x":
        if check and np.any(x > xbar_p + tol):
            raise ValueError(f"small_x regime needs x <= xbar_p = {xbar_p:.6g}")
        return (_LOG2 - 0.5 * c * c - math.log(math.pi) - 0.5 * math.log(dc)
                - 0.5 * dx * dc - 0.5 * np.log(dx) - np.log(rx * dx - 2.0 * c))[()]
    raise ValueError(f"unknown regime {regime!r}")


def predict_q_x(x, ctx: KernelContext, regime: str, b_p: float | None = None):
    return np.exp(log_predict_q_x(x, ctx, regime, b_p))[()]


def log_predict_q_tp(ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    """Leading-order ``log q_tp`` by the case formula matching ``xi``.

    For ``xi = 2`` the arcsine-law integral over ``[1 - sqrt2/r, sqrt2/r]``
    is evaluated in closed form ``2 (asin sqrt(b) - asin sqrt(a))``; at the
    default threshold ``r = 2`` this equals ``2 asin(sqrt2 - 1)``.
    For ``xi > 2`` the formula involves ``q_x(c_p)``, which is computed by
    quadrature.
    """
    xi, t, c, rx = ctx.xi, ctx.t_p, ctx.c_p, ctx.sqrt_xi
    if xi < 2:
        return (0.5 * math.log(2 * (2 + xi) / (math.pi * (2 - xi)))
                - t * t / (2 + xi) - math.log(t))
    if xi == 2:
        hi = math.sqrt(2.0) / ctx.r
        lo = 1.0 - hi
        if not 0 <= lo < hi <= 1:
            raise ValueError(f"r={ctx.r} gives an empty arcsine interval")
        integral = 2.0 * (math.asin(math.sqrt(hi)) - math.asin(math.sqrt(lo)))
        return -t * t / 4.0 - math.log(math.sqrt(2.0) * math.pi) + math.log(integral)
    denom = (xi * xi - 4.0) * c - (xi - 2.0) * rx * t
    return math.log(8.0) + log_q_x(c, ctx, spec) + log_std_normal_pdf(c) - math.log(denom)


def predict_q_tp(ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    return math.exp(log_predict_q_tp(ctx, spec))


def log_predict_q_moment(j: int, ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC,
                         log_qc: float | None = None) -> float:
    """Leading term of ``E[q_x(zbar)^j]`` for ``xi > 2`` and ``j >= 2``."""
    xi, t, c, rx = ctx.xi, ctx.t_p, ctx.c_p, ctx.sqrt_xi
    if not xi > 2:
        raise ValueError("moment asymptotics are stated for xi > 2")
    lq = log_q_x(c, ctx, spec) if log_qc is None else log_qc
    denom = (j * xi * xi - 4.0) * c - j * (xi - 2.0) * rx * t
    return math.log(4.0) + j * lq + log_std_normal_pdf(c) - math.log(denom)


def predict_q_moment(j: int, ctx: KernelContext, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    return math.exp(log_predict_q_moment(j, ctx, spec))


# ---------------------------------------------------------------------------
# Limit diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    """A finite-p quantity next to its predicted value, both kept as logs.

    Logs matter here: at ``p = 1e100`` some kernels are below the double
    range even though their ratio to the prediction is near 1.
    """

    name: str
    p: float
    log_value: float
    log_predicted: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    @property
    def predicted(self) -> float:
        return math.exp(self.log_predicted)

    @property
    def ratio(self) -> float:
        return math.exp(self.log_value - self.log_predicted)


def chores_limits(ctx: KernelContext, j_max: int = 3,
                  spec: QuadratureSpec = KERNEL_SPEC) -> list[Diagnostic]:
    """Finite-p quantities paired with their stated limits.

    Always: ``p phi(c)/c -> e^-y`` and ``p^2 q_tp``.  For ``xi <= 2`` the
    latter tends to ``2 e^-z``.  For ``xi > 2`` it tends to
    ``2 eta tau e^-y / (1 - eta)``, and additionally ``p q_x(c) -> tau`` and
    ``p^(j+1) E[q_x^j] -> eta tau^j e^-y / (j - eta)`` for ``2 <= j <= j_max``,
    where ``tau = exp((y - z)/eta)``.
    """
    if not 1 <= j_max <= 8:
        raise ValueError("j_max must lie in [1, 8]")
    lp, c, y, z = ctx.log_p, ctx.c_p, ctx.y, ctx.z
    cache = _LogQxCache(ctx, spec)
    out = [Diagnostic("p*phi(c)/c", ctx.p, lp + log_std_normal_pdf(c) - math.log(c), -y)]
    ltp = log_q_tp(ctx, spec, _cache=cache)
    if ctx.xi <= 2:
        out.append(Diagnostic("p^2*q_tp", ctx.p, 2 * lp + ltp, _LOG2 - z))
        return out
    et = eta_of(ctx.xi)
    lqc = float(cache(np.array([c]))[0])
    log_tau = (y - z) / et
    out.append(Diagnostic("p*q_x(c)", ctx.p, lp + lqc, log_tau))
    out.append(Diagnostic("p^2*q_tp", ctx.p, 2 * lp + ltp,
                          math.log(2 * et / (1 - et)) + log_tau - y))
    for j in range(2, j_max + 1):
        lm = log_q_moment(j, ctx, spec, _cache=cache)
        out.append(Diagnostic(f"p^{j + 1}*q_moment({j})", ctx.p, (j + 1) * lp + lm,
                              math.log(et / (j - et)) + j * log_tau - y))
    return out


UPPER_GRID_POINTS = 41


def lemma_diagnostics(ctx: KernelContext, j_max: int = 3,
                      spec: QuadratureSpec = KERNEL_SPEC) -> list[Diagnostic]:
    """:func:`chores_limits` plus kernel-versus-approximation ratios.

    The extra rows compare ``q_tp`` with :func:`predict_q_tp`, and ``q_x``
    with :func:`predict_q_x` in each regime: ``bulk`` at ``x = c_p`` (only
    when ``x_p <= c_p``), ``small_x`` at ``xbar_p - 10``, and ``upper`` at
    the point of a grid on ``[-c_p, c_p]`` where the ratio is largest.
    """
    out = chores_limits(ctx, j_max, spec)
    c, lp = ctx.c_p, ctx.log_p
    p2q = next(d for d in out if d.name == "p^2*q_tp")
    out.append(Diagnostic("q_tp/approx", ctx.p, p2q.log_value - 2 * lp,
                          log_predict_q_tp(ctx, spec)))
    x_p, xbar_p = ctx.x_bounds()
    if x_p <= c:
        out.append(Diagnostic("q_x(c)/bulk", ctx.p, log_q_x(c, ctx, spec),
                              float(log_predict_q_x(c, ctx, "bulk"))))
    xs = xbar_p - 10.0
    out.append(Diagnostic("q_x(xbar-10)/small_x", ctx.p, log_q_x(xs, ctx, spec),
                          float(log_predict_q_x(xs, ctx, "small_x"))))
    grid = np.linspace(-c, c, UPPER_GRID_POINTS)
    pairs = [(log_q_x(float(v), ctx, spec), float(log_predict_q_x(v, ctx, "upper"))) for v in grid]
    best = max(pairs, key=lambda ab: ab[0] - ab[1])
    out.append(Diagnostic("max q_x/upper", ctx.p, best[0], best[1]))
    return out


# ---------------------------------------------------------------------------
# Series identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesCheck:
    partial_sums: tuple[float, ...]
    integral_value: float
    terms: tuple[float, ...]

    @property
    def gap(self) -> float:
        return abs(self.partial_sums[-1] - self.integral_value)

    @property
    def bound(self) -> float:
        """First omitted term, ``gamma_{J+1} / (J+1)!``."""
        return self.terms[-1]


def series_gamma(j: int, tau: float, eta_: float, y: float) -> float:
    """``gamma_j = eta tau^j e^-y / (j - eta)``; at ``j = 1`` this is half the ``p^2 q_tp`` limit."""
    return eta_ / (j - eta_) * tau ** j * math.exp(-y)


def series_identity_check(tau: float | None, eta_: float, y: float, z: float,
                          j_max: int) -> SeriesCheck:
    """Partial sums of ``sum_j (-1)^(j-1) gamma_j / j!`` against ``eta e^-z I(tau, eta)``.

    ``tau`` must equal ``exp((y - z)/eta)``; pass ``None`` to derive it.
    The terms alternate and shrink once ``j > tau``, so
    ``|S_J - limit| <= gamma_{J+1} / (J+1)!`` there.
    """
    expected = math.exp((y - z) / eta_)
    if tau is None:
        tau = expected
    elif not math.isclose(tau, expected, rel_tol=1e-12):
        raise ValueError(f"tau={tau} inconsistent with exp((y-z)/eta)={expected}")
    terms, sums, s = [], [], 0.0
    for j in range(1, j_max + 2):
        term = series_gamma(j, tau, eta_, y) / math.factorial(j)
        terms.append(term)
        if j <= j_max:
            s += (-1) ** (j - 1) * term
            sums.append(s)
    integral = eta_ * math.exp(-z) * float(inner_integral(tau, eta_))
    return SeriesCheck(tuple(sums), integral, tuple(terms))
