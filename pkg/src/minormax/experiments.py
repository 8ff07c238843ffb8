"""Monte Carlo runner, Kolmogorov-Smirnov analysis and report files.

A run is described by an :class:`ExperimentConfig`.  Replicate ``k`` draws
from ``SeedSpec(master_seed, k)`` only, and results are gathered into a
pre-sized array by index, so the statistics vector is the same for any
thread count and adding replicates keeps the earlier ones unchanged.

Output files
------------
``<stem>.json``
    The :class:`GofReport` fields, the canonical config and a timestamp.
    Keys are sorted; the timestamp is not part of ``config_hash``.
``<stem>.csv``
    Header ``replicate,raw_stat,normalized_stat``, one row per replicate,
    floats written with ``repr`` (shortest round-trip form), LF endings.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .ensembles import DeformedGoe, SeedSpec, Wishart, distribution_from_name
from .limit_laws import Gumbel, LimitLaw, law_for, law_from_description
from .minor_stats import diag_max, goe_pair_max, wishart_pair_max

__all__ = [
    "ExperimentConfig",
    "GofReport",
    "McSamples",
    "config_from_dict",
    "fnv1a_64",
    "ks_distance",
    "read_samples_csv",
    "resolve_law",
    "run_mc",
    "run_trend",
    "write_report",
]

STATISTICS = ("pair_max", "diag_max")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a Monte Carlo run.

    ``statistic`` is ``"pair_max"`` (the 2x2-minor maximum) or
    ``"diag_max"`` (the largest diagonal entry, deformed GOE only).
    ``grid`` lists dimensions ``p`` for a GOE trend study, or sample sizes
    ``n`` for a Wishart one.
    """

    ensemble: DeformedGoe | Wishart
    replicates: int
    master_seed: int
    threads: int | str = 1
    law_override: LimitLaw | None = None
    output_path: str | None = None
    grid: tuple[int, ...] | None = None
    statistic: str = "pair_max"

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if self.threads != "auto" and not (isinstance(self.threads, int) and self.threads >= 1):
            raise ValueError("threads must be a positive integer or 'auto'")
        if self.statistic not in STATISTICS:
            raise ValueError(f"statistic must be one of {STATISTICS}")
        if self.statistic == "diag_max" and not isinstance(self.ensemble, DeformedGoe):
            raise ValueError("diag_max is defined for the deformed GOE only")
        if self.grid is not None:
            object.__setattr__(self, "grid", tuple(int(v) for v in self.grid))

    def to_dict(self) -> dict:
        ens = self.ensemble
        if isinstance(ens, DeformedGoe):
            e = {"kind": "goe", "xi": ens.xi, "p": ens.p}
        else:
            e = {"kind": "wishart", "n": ens.n, "p": ens.p, "dist": ens.dist.name}
            if ens.dist.name == "student":
                e["df"] = ens.dist.df
        return {
            "ensemble": e,
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "threads": self.threads,
            "law_override": self.law_override.describe() if self.law_override else None,
            "output_path": self.output_path,
            "grid": list(self.grid) if self.grid is not None else None,
            "statistic": self.statistic,
        }

    def canonical_text(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return f"{fnv1a_64(self.canonical_text().encode('utf-8')):016x}"

    def worker_count(self) -> int:
        if self.threads == "auto":
            return os.cpu_count() or 1
        return int(self.threads)


def config_from_dict(d: dict) -> ExperimentConfig:
    e = d["ensemble"]
    if e["kind"] == "goe":
        ens = DeformedGoe(float(e["xi"]), int(e["p"]))
    else:
        ens = Wishart(int(e["n"]), int(e["p"]), distribution_from_name(e["dist"], e.get("df", 7.0)))
    law = law_from_description(d["law_override"]) if d.get("law_override") else None
    return ExperimentConfig(ens, int(d["replicates"]), int(d["master_seed"]), d.get("threads", 1),
                            law, d.get("output_path"), d.get("grid"), d.get("statistic", "pair_max"))


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def resolve_law(config: ExperimentConfig) -> LimitLaw:
    """The override if given, Gumbel for ``diag_max``, else the law for the ensemble's ``xi``."""
    if config.law_override is not None:
        return config.law_override
    if config.statistic == "diag_max":
        return Gumbel()
    return law_for(config.ensemble.xi)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McSamples:
    raw: np.ndarray
    normalized: np.ndarray

    def __len__(self):
        return len(self.normalized)


def _replicate_fn(config: ExperimentConfig):
    ens, seed = config.ensemble, config.master_seed
    if config.statistic == "diag_max":
        def one(k):
            r = diag_max(ens.xi, ens.p, SeedSpec(seed, k))
            return r.raw_max, r.normalized
    elif isinstance(ens, DeformedGoe):
        def one(k):
            r = goe_pair_max(ens.xi, ens.p, SeedSpec(seed, k))
            return r.raw_max, r.normalized
    else:
        def one(k):
            r = wishart_pair_max(ens.n, ens.p, ens.dist, SeedSpec(seed, k))
            return r.raw_max, r.normalized
    return one


def run_mc(config: ExperimentConfig) -> McSamples:
    """Raw and normalized statistics for replicates ``0 .. replicates-1``."""
    one = _replicate_fn(config)
    raw = np.empty(config.replicates)
    norm = np.empty(config.replicates)
    workers = config.worker_count()
    if workers == 1:
        results = map(one, range(config.replicates))
        for k, (r, s) in enumerate(results):
            raw[k], norm[k] = r, s
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for k, (r, s) in enumerate(pool.map(one, range(config.replicates))):
                raw[k], norm[k] = r, s
    return McSamples(raw, norm)


def run_trend(config: ExperimentConfig) -> list[tuple[int, ExperimentConfig, McSamples]]:
    """Repeat :func:`run_mc` over ``config.grid`` with the same seed family.

    Grid values replace ``p`` for a deformed GOE and ``n`` for Wishart.
    """
    if not config.grid:
        raise ValueError("config.grid is empty")
    out = []
    for v in config.grid:
        ens = config.ensemble
        ens = replace(ens, p=v) if isinstance(ens, DeformedGoe) else replace(ens, n=v)
        sub = replace(config, ensemble=ens, grid=None)
        out.append((v, sub, run_mc(sub)))
    return out


# ---------------------------------------------------------------------------
# Goodness of fit
# ---------------------------------------------------------------------------

def _ks_from_sorted(x: np.ndarray, cdf_vals: np.ndarray) -> float:
    r = len(x)
    i = np.arange(1, r + 1)
    d_plus = np.max(i / r - cdf_vals)
    d_minus = np.max(cdf_vals - (i - 1) / r)
    return float(min(1.0, max(d_plus, d_minus, 0.0)))


def ks_distance(samples, law: LimitLaw) -> float:
    """One-sample two-sided Kolmogorov-Smirnov distance to ``law``.

    ``max_i max(F(x_(i)) - (i-1)/R, i/R - F(x_(i)))`` over the sorted sample.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("ks_distance needs a nonempty sample")
    if np.any(np.isnan(x)):
        raise ValueError("sample contains NaN")
    return _ks_from_sorted(x, np.asarray(law.cdf(x), dtype=float))


@dataclass(frozen=True)
class GofReport:
    ks: float
    n_samples: int
    law: dict
    ecdf_grid: list[tuple[float, float]]
    theory_grid: list[tuple[float, float]]
    sample_median: float
    config_hash: str
    config: dict = field(default_factory=dict)

    @classmethod
    def build(cls, samples, law: LimitLaw, config: ExperimentConfig) -> GofReport:
        x = np.sort(np.asarray(samples, dtype=float))
        if x.size == 0 or np.any(np.isnan(x)):
            raise ValueError("cannot report on an empty sample or one containing NaN")
        f = np.asarray(law.cdf(x), dtype=float)
        r = x.size
        ecdf = [(float(v), (k + 1) / r) for k, v in enumerate(x)]
        theory = [(float(v), float(fv)) for v, fv in zip(x, f)]
        return cls(ks=_ks_from_sorted(x, f), n_samples=r, law=law.describe(), ecdf_grid=ecdf,
                   theory_grid=theory, sample_median=float(np.median(x)),
                   config_hash=config.config_hash(), config=config.to_dict())

    def to_json_dict(self) -> dict:
        return {
            "ks": self.ks,
            "n_samples": self.n_samples,
            "law": self.law,
            "ecdf_grid": [list(t) for t in self.ecdf_grid],
            "theory_grid": [list(t) for t in self.theory_grid],
            "sample_median": self.sample_median,
            "config_hash": self.config_hash,
            "config": self.config,
        }


def _paths(output_path: str | os.PathLike) -> tuple[Path, Path]:
    base = Path(output_path)
    stem = base.with_suffix("") if base.suffix in (".json", ".csv") else base
    return stem.with_suffix(".json"), stem.with_suffix(".csv")


def write_samples_csv(path, samples: McSamples) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replicate", "raw_stat", "normalized_stat"])
        for k, (r, s) in enumerate(zip(samples.raw, samples.normalized)):
            w.writerow([k, repr(float(r)), repr(float(s))])


def read_samples_csv(path) -> McSamples:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["replicate", "raw_stat", "normalized_stat"]:
        raise ValueError(f"{path}: unexpected CSV header")
    body = rows[1:]
    for k, row in enumerate(body):
        if int(row[0]) != k:
            raise ValueError(f"{path}: replicate column out of order at row {k + 1}")
    return McSamples(np.array([float(r[1]) for r in body]),
                     np.array([float(r[2]) for r in body]))


def write_report(samples: McSamples, law: LimitLaw, config: ExperimentConfig,
                 timestamp: str | None = None) -> GofReport:
    """Build the :class:`GofReport` and write ``<stem>.json`` and ``<stem>.csv``.

    The stem comes from ``config.output_path``; a ``.json`` or ``.csv``
    suffix is stripped first.
    """
    if config.output_path is None:
        raise ValueError("config.output_path is not set")
    report = GofReport.build(samples.normalized, law, config)
    json_path, csv_path = _paths(config.output_path)
    doc = report.to_json_dict()
    doc["timestamp"] = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    json_path.parent.mkdir(parents=True, exist_ok=True)
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
    write_samples_csv(csv_path, samples)
    return report
