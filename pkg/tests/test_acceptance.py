"""Acceptance suite: one PASS/FAIL line per criterion at the fixed tolerances.

Run with ``pytest -v -s tests/test_acceptance.py`` or directly with
``python3 tests/test_acceptance.py``.  Seeds are fixed in advance.  The
Monte Carlo criteria take about seven minutes on one core.
"""

import functools
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from minormax.ensembles import (  # noqa: E402
    DeformedGoe,
    Rademacher,
    SeedSpec,
    StdGaussian,
    Wishart,
    draw_wishart_X,
    stream_goe_offdiag,
)
from minormax.experiments import (  # noqa: E402
    ExperimentConfig,
    ks_distance,
    resolve_law,
    run_mc,
    write_report,
)
from minormax.limit_laws import (  # noqa: E402
    Gumbel,
    feng_consistency_delta,
    gumbel_cdf,
    gumbel_quantile,
    gxi_cdf,
    inner_integral,
)
from minormax.minor_stats import goe_pair_max, top_eig_2x2, wishart_pair_max  # noqa: E402
from minormax.q_kernels import chores_limits, kernel_context, series_identity_check  # noqa: E402
from oracles import gxi_cdf_oracle, inner_integral_oracle, quadratic_root_mp  # noqa: E402

GOE_SEED = 7
WISHART_SEED = 9


class Checks:
    """Named sub-checks of one criterion."""

    def __init__(self):
        self.items = []

    def add(self, label, ok, detail=""):
        self.items.append((label, bool(ok), detail))

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.items)

    def summary(self):
        failed = [f"{lab} [{det}]" for lab, ok, det in self.items if not ok]
        if failed:
            return f"{len(failed)}/{len(self.items)} checks failed: " + "; ".join(failed)
        return f"{len(self.items)} checks"


# --- 1 ------------------------------------------------------------------------------------

@functools.cache
def criterion_1():
    c = Checks()
    rng = np.random.default_rng(1)
    a, d, b = rng.standard_normal((3, 10**5))
    ref = quadratic_root_mp(a, d, b)
    err = float(np.max(np.abs(top_eig_2x2(a, d, b) - ref) / np.abs(ref)))
    c.add("top_eig rel err", err <= 1e-12, f"{err:.2e}")

    worst = 0.0
    for tau in [1e-6, 1e-2, 1.0, 10.0, 1e3]:
        for e in [0.05, 0.3, 2 / 3, 0.9]:
            ref = inner_integral_oracle(tau, e)[0]
            worst = max(worst, abs(float(inner_integral(tau, e)) / ref - 1))
    c.add("inner_integral 20-point grid", worst <= 1e-9, f"max rel {worst:.2e}")

    s = series_identity_check(1.0, 2 / 3, 0.0, 0.0, 20)
    c.add("series gap <= bound", s.gap <= s.bound, f"gap {s.gap:.2e} bound {s.bound:.2e}")

    qs = np.arange(1, 1000) / 1000
    inv = float(np.max(np.abs(gumbel_cdf(gumbel_quantile(qs)) - qs)))
    c.add("Gumbel inverse", inv <= 1e-12, f"{inv:.2e}")

    mism = 0
    for k in range(20):
        seed = SeedSpec(GOE_SEED, k)
        acc = [0.0]
        stream_goe_offdiag(300, seed, lambda i, j, z: acc.__setitem__(0, max(acc[0], abs(z))))
        mism += goe_pair_max(0.0, 300, seed).raw_max != acc[0]
    c.add("xi=0 GOE equals max |z_ij|", mism == 0, f"{mism} mismatches of 20")

    mism = 0
    n, p = 1000, 20
    for k in range(50):
        seed = SeedSpec(WISHART_SEED, k)
        X = draw_wishart_X(n, p, Rademacher(), seed)
        off = np.abs((X.T @ X)[np.triu_indices(p, 1)]).max()
        mism += wishart_pair_max(n, p, Rademacher(), seed).raw_max - n != off
    c.add("Rademacher raw-n = max|w_ij|", mism == 0, f"{mism} mismatches of 50")
    return c


# --- 2 ------------------------------------------------------------------------------------

@functools.cache
def criterion_2():
    c = Checks()
    for e in [0.1, 0.4, 2 / 3, 0.9]:
        vals = np.array([gxi_cdf(z, e) for z in np.linspace(-10, 30, 200)])
        drop = float(-np.min(np.diff(vals)))
        c.add(f"eta={e:.3g} monotone", drop <= 1e-9, f"max drop {drop:.1e}")
        lo, hi = gxi_cdf(-40.0, e), gxi_cdf(80.0, e)
        c.add(f"eta={e:.3g} left tail", lo < 1e-6, f"{lo:.1e}")
        c.add(f"eta={e:.3g} right tail", hi > 1 - 1e-6, f"1-{1 - hi:.1e}")
    diff = abs(gxi_cdf(0.0, 2 / 3) - gxi_cdf_oracle(0.0, 2 / 3))
    c.add("G(0; 2/3) vs tensor oracle", diff <= 1e-6, f"{diff:.1e}")
    return c


# --- 3 ------------------------------------------------------------------------------------

BANDS = {
    (1.0, "p*phi(c)/c"): 0.01, (2.0, "p*phi(c)/c"): 0.01, (4.0, "p*phi(c)/c"): 0.01,
    (1.0, "p^2*q_tp"): 0.02, (2.0, "p^2*q_tp"): 0.02,
    (4.0, "p*q_x(c)"): 0.02, (4.0, "p^2*q_tp"): 0.03,
    (4.0, "p^3*q_moment(2)"): 0.05, (4.0, "p^4*q_moment(3)"): 0.05,
}


@functools.cache
def lemma_ratios():
    out = {}
    for xi in (1.0, 2.0, 4.0):
        for p in (1e10, 1e100):
            for dgn in chores_limits(kernel_context(xi, p, 0.0, 0.0), j_max=3):
                out[(xi, dgn.name, p)] = dgn.ratio
    return out


@functools.cache
def criterion_3():
    c = Checks()
    r = lemma_ratios()
    for (xi, name), band in BANDS.items():
        hi, lo = r[(xi, name, 1e100)], r[(xi, name, 1e10)]
        c.add(f"xi={xi:g} {name} band", abs(hi - 1) <= band, f"ratio {hi:.4f}, band {band}")
        c.add(f"xi={xi:g} {name} trend", abs(hi - 1) < abs(lo - 1),
              f"|r-1| {abs(lo - 1):.4f} -> {abs(hi - 1):.4f}")
    return c


# --- 4 ------------------------------------------------------------------------------------

@functools.cache
def criterion_4():
    c = Checks()
    for z in (-2.0, 0.0, 2.0):
        d8, d100 = feng_consistency_delta(1e8, z), feng_consistency_delta(1e100, z)
        c.add(f"z={z:g}", d100 <= 0.01 and d100 < d8, f"{d8:.2e} -> {d100:.2e}")
    return c


# --- 5 ------------------------------------------------------------------------------------

@functools.cache
def goe_ks(xi, p):
    cfg = ExperimentConfig(DeformedGoe(xi, p), 2000, GOE_SEED, threads="auto")
    law = resolve_law(cfg)
    s = run_mc(cfg).normalized
    return ks_distance(s, law), float(np.median(s)), float(law.quantile(0.5))


@functools.cache
def criterion_5():
    c = Checks()
    for xi in (0.0, 1.0, 2.0, 4.0):
        k100, _, _ = goe_ks(xi, 100)
        goe_ks(xi, 400)
        k1600, med, law_med = goe_ks(xi, 1600)
        c.add(f"xi={xi:g} trend", k1600 <= k100 + 0.01, f"KS {k100:.4f} -> {k1600:.4f}")
        c.add(f"xi={xi:g} band", k1600 <= 0.12, f"KS {k1600:.4f}")
        c.add(f"xi={xi:g} median", abs(med - law_med) <= 0.5, f"{med:.3f} vs {law_med:.3f}")
    return c


# --- 6 ------------------------------------------------------------------------------------

@functools.cache
def wishart_ks(dist_name, n):
    dist = StdGaussian() if dist_name == "gaussian" else Rademacher()
    cfg = ExperimentConfig(Wishart(n, 20, dist), 500, WISHART_SEED, threads="auto")
    law = resolve_law(cfg)
    assert isinstance(law, Gumbel)
    return ks_distance(run_mc(cfg).normalized, law)


@functools.cache
def criterion_6():
    c = Checks()
    for name in ("gaussian", "rademacher"):
        small, large = wishart_ks(name, 20_000), wishart_ks(name, 200_000)
        c.add(f"{name} band", large <= 0.15, f"KS {large:.4f}")
        c.add(f"{name} trend", large <= small + 0.01, f"KS {small:.4f} -> {large:.4f}")
    return c


# --- 7 ------------------------------------------------------------------------------------

@functools.cache
def criterion_7():
    c = Checks()
    cfg = ExperimentConfig(DeformedGoe(1.0, 100_000), 10_000, GOE_SEED, statistic="diag_max")
    ks = ks_distance(run_mc(cfg).normalized, Gumbel())
    c.add("KS vs Gumbel", ks <= 0.03, f"KS {ks:.4f}")
    return c


# --- 8 ------------------------------------------------------------------------------------

def _stat_columns(path):
    lines = Path(path).read_bytes().split(b"\n")
    return b"\n".join(b",".join(line.split(b",")[1:]) for line in lines)


@functools.cache
def criterion_8():
    c = Checks()
    ensembles = {"goe": DeformedGoe(4.0, 400), "wishart": Wishart(2000, 12, Rademacher())}
    with tempfile.TemporaryDirectory() as tmp:
        for label, ens in ensembles.items():
            cols = []
            for threads in (1, 8):
                out = Path(tmp) / f"{label}_{threads}.json"
                cfg = ExperimentConfig(ens, 300, 2024, threads=threads, output_path=str(out))
                write_report(run_mc(cfg), resolve_law(cfg), cfg)
                cols.append(_stat_columns(out.with_suffix(".csv")))
            c.add(f"{label} 1 vs 8 threads", cols[0] == cols[1], f"{len(cols[0])} bytes")
    return c


# --- reporting ---------------------------------------------------------------------------

CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
}


def report_line(k):
    c = CRITERIA[k]()
    return c.passed, f"CRITERION {k}: {'PASS' if c.passed else 'FAIL'} ({c.summary()})"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    passed, line = report_line(k)
    with capsys.disabled():
        print("\n" + line)
    assert passed, line


if __name__ == "__main__":
    results = []
    for k in sorted(CRITERIA):
        passed, line = report_line(k)
        print(line, flush=True)
        results.append(passed)
    sys.exit(0 if all(results) else 1)
