import math

import numpy as np
import pytest

from minormax.ensembles import (
    DeformedGoe,
    MemoryBudgetExceeded,
    Rademacher,
    ScaledStudentT,
    SeedSpec,
    StdGaussian,
    UniformVar1,
    Wishart,
    distribution_from_name,
    draw_goe_diag,
    draw_wishart_X,
    iter_goe_offdiag_blocks,
    stream_goe_offdiag,
)

DISTS = [StdGaussian(), Rademacher(), UniformVar1(), ScaledStudentT(7.0)]


def test_seedspec_validation():
    with pytest.raises(ValueError):
        SeedSpec(-1)
    with pytest.raises(ValueError):
        SeedSpec(2**64)
    with pytest.raises(ValueError):
        SeedSpec(1, -1)
    SeedSpec(2**64 - 1, 10**9)


def test_streams_are_distinct():
    s = SeedSpec(5, 3)
    a = s.generator(0).standard_normal(4)
    b = s.generator(1).standard_normal(4)
    c = SeedSpec(5, 4).generator(0).standard_normal(4)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


# --- entry distributions ----------------------------------------------------------

@pytest.mark.parametrize("dist", DISTS, ids=lambda d: d.name)
def test_entry_moments(dist):
    x = dist.draw(SeedSpec(1).generator(7), 10**7)
    assert abs(x.mean()) <= 4 * 10 ** -3.5
    assert abs(x.var() - 1) <= 0.01
    fourth = np.mean(x ** 4) - 1
    if dist.xi == 0:
        assert fourth == pytest.approx(0.0, abs=1e-12)
    else:
        assert fourth == pytest.approx(dist.xi, rel=0.03)


def test_reported_xi_values():
    assert StdGaussian().xi == 2.0
    assert Rademacher().xi == 0.0
    assert UniformVar1().xi == pytest.approx(4 / 5)
    assert ScaledStudentT(7.0).xi == pytest.approx(4.0)
    assert ScaledStudentT(10.0).xi == pytest.approx(3.0)
    with pytest.raises(ValueError):
        ScaledStudentT(6.0)


def test_distribution_from_name():
    assert distribution_from_name("gaussian") == StdGaussian()
    assert distribution_from_name("student", 9.0) == ScaledStudentT(9.0)
    with pytest.raises(ValueError):
        distribution_from_name("cauchy")


def test_ensemble_specs():
    with pytest.raises(ValueError):
        DeformedGoe(-1.0, 10)
    with pytest.raises(ValueError):
        DeformedGoe(1.0, 1)
    with pytest.raises(ValueError):
        Wishart(0, 5)
    assert Wishart(10, 5, Rademacher()).xi == 0.0


# --- GOE diagonal -----------------------------------------------------------------

def test_diag_xi_zero_is_zero():
    v = draw_goe_diag(0.0, 50, SeedSpec(1))
    assert np.array_equal(v, np.zeros(50))


def test_diag_variance():
    v = draw_goe_diag(3.0, 10**6, SeedSpec(2))
    assert v.var() == pytest.approx(3.0, rel=0.02)


def test_diag_replay_and_scaling():
    s = SeedSpec(11, 4)
    a, b = draw_goe_diag(1.0, 100, s), draw_goe_diag(1.0, 100, s)
    assert np.array_equal(a, b)
    assert np.array_equal(draw_goe_diag(4.0, 100, s), 2.0 * a)
    with pytest.raises(ValueError):
        draw_goe_diag(-1.0, 3, s)


# --- GOE off-diagonal stream ----------------------------------------------------------

def test_stream_p3_order():
    seen = []
    n = stream_goe_offdiag(3, SeedSpec(0), lambda i, j, z: seen.append((i, j)))
    assert n == 3 and seen == [(0, 1), (0, 2), (1, 2)]


def test_stream_count_and_early_stop():
    p = 57
    assert stream_goe_offdiag(p, SeedSpec(0), lambda i, j, z: None) == p * (p - 1) // 2
    assert stream_goe_offdiag(p, SeedSpec(0), lambda i, j, z: False) == 1


def test_stream_variance_p2000():
    vals = np.concatenate([v for _, _, v in iter_goe_offdiag_blocks(2000, SeedSpec(3))])
    assert vals.size == 2000 * 1999 // 2
    assert vals.var() == pytest.approx(1.0, rel=0.01)


def test_stream_replay_and_block_invariance():
    s = SeedSpec(9, 2)
    whole = np.concatenate([v for _, _, v in iter_goe_offdiag_blocks(200, s)])
    small = np.concatenate([v for _, _, v in iter_goe_offdiag_blocks(200, s, block_entries=7)])
    again = []
    stream_goe_offdiag(200, s, lambda i, j, z: again.append(z))
    assert np.array_equal(whole, small) and np.array_equal(whole, np.array(again))


def test_stream_blocks_cover_rows():
    rows = [(a, b) for a, b, _ in iter_goe_offdiag_blocks(300, SeedSpec(1), block_entries=1000)]
    assert rows[0][0] == 0 and rows[-1][1] == 299
    assert all(b1 == a2 for (_, b1), (a2, _) in zip(rows, rows[1:]))


def test_replicate_independence():
    # a scalar summary from neighbouring replicates must be uncorrelated
    s = np.array([draw_goe_diag(1.0, 8, SeedSpec(77, k)).mean() for k in range(10_001)])
    r = np.corrcoef(s[:-1], s[1:])[0, 1]
    assert abs(r) <= 0.05


# --- Wishart -----------------------------------------------------------------------

def test_wishart_rademacher_entries():
    X = draw_wishart_X(300, 7, Rademacher(), SeedSpec(1))
    assert set(np.unique(X)) == {-1.0, 1.0}


def test_wishart_column_mean():
    X = draw_wishart_X(10**6, 1, StdGaussian(), SeedSpec(2))
    assert abs(X[:, 0].mean()) <= 4 / math.sqrt(10**6)


def test_wishart_layout_and_replay():
    s = SeedSpec(4, 1)
    X = draw_wishart_X(50, 6, UniformVar1(), s)
    assert X.shape == (50, 6) and X.flags.f_contiguous
    assert np.array_equal(X, draw_wishart_X(50, 6, UniformVar1(), s))
    # column j is the j-th run of n draws
    raw = UniformVar1().draw(s.generator(2), 300)
    assert np.array_equal(X[:, 1], raw[50:100])


def test_wishart_budget():
    with pytest.raises(MemoryBudgetExceeded):
        draw_wishart_X(1000, 1000, StdGaussian(), SeedSpec(0), max_entries=10**5)
