import numpy as np
import pytest

import jostspec as js
from conftest import random_block
from jostspec.errors import DegenerateBranchError, NoAdmissibleIntervalError, RootCountWarning


def test_free_band(free_block):
    bs = js.band_edges(free_block)
    assert len(bs.bands) == 1
    lo, hi = bs.bands[0]
    assert lo == pytest.approx(-2.0, abs=1e-10)
    assert hi == pytest.approx(2.0, abs=1e-10)


def test_two_periodic_bands():
    block = js.periodic_block(2, [1.0, 2.0], [0.0, 0.0])
    bs = js.band_edges(block)
    assert len(bs.bands) == 2
    (l1, r1), (l2, r2) = bs.bands
    assert l1 == pytest.approx(-3.0, abs=1e-10)
    assert r1 == pytest.approx(-1.0, abs=1e-10)
    assert l2 == pytest.approx(1.0, abs=1e-10)
    assert r2 == pytest.approx(3.0, abs=1e-10)


def test_shifted_free_band():
    block = js.periodic_block(1, [1.0], [1.0])
    bs = js.band_edges(block)
    lo, hi = bs.bands[0]
    assert lo == pytest.approx(-1.0, abs=1e-10)
    assert hi == pytest.approx(3.0, abs=1e-10)


def test_closed_gap_emits_root_count_warning():
    # free operator written as a 2-periodic block: double root at E = 0
    block = js.periodic_block(2, [1.0, 1.0], [0.0, 0.0])
    with pytest.warns(RootCountWarning):
        bs = js.band_edges(block)
    assert len(bs.bands) == 1
    lo, hi = bs.bands[0]
    assert lo == pytest.approx(-2.0, abs=1e-10)
    assert hi == pytest.approx(2.0, abs=1e-10)
    assert bs.warnings


def test_band_edges_satisfy_tolerance():
    rng = np.random.default_rng(23)
    for q in (1, 2, 3):
        block = random_block(rng, q)
        bs = js.band_edges(block, tol=1e-12)
        assert 1 <= len(bs.bands) <= q
        for lo, hi in bs.bands:
            assert abs(abs(js.discriminant(block, lo)) - 2.0) < 1e-10
            assert abs(abs(js.discriminant(block, hi)) - 2.0) < 1e-10
        # disjoint and ordered
        for (a, b), (c, d) in zip(bs.bands[:-1], bs.bands[1:]):
            assert b < c


def test_admissible_free(free_block):
    intervals = js.admissible_intervals(free_block, margin=0.1)
    assert len(intervals) == 1
    iv = intervals[0]
    assert iv.lo == pytest.approx(-1.9, abs=1e-9)
    assert iv.hi == pytest.approx(1.9, abs=1e-9)
    assert iv.eps_I > 0 and iv.C_I > 0


def test_admissible_excludes_corner_zero():
    # C(E) = E and discriminant derivative both vanish at 0 for this block
    block = js.periodic_block(2, [1.0, 1.0], [0.0, 0.0])
    with pytest.warns(RootCountWarning):
        intervals = js.admissible_intervals(block, margin=0.1)
    assert len(intervals) == 2
    (a1, b1), (a2, b2) = [(iv.lo, iv.hi) for iv in intervals]
    assert b1 == pytest.approx(-0.1, abs=1e-6)
    assert a2 == pytest.approx(0.1, abs=1e-6)


def test_admissible_margin_too_large(free_block):
    with pytest.raises(NoAdmissibleIntervalError):
        js.admissible_intervals(free_block, margin=2.5)


def test_interval_constants_free_symmetric(free_block):
    eps_i, c_i = js.interval_constants(free_block, (-1.0, 1.0))
    assert c_i == pytest.approx(0.25, abs=1e-6)
    assert eps_i > 0
    eps_w, c_w = js.interval_constants(free_block, (-1.9, 1.9))
    # minimum of |delta'| / sqrt(4 - delta^2) still sits at E = 0
    assert c_w == pytest.approx(0.25, abs=1e-6)


def test_interval_constants_monotone_under_shrinking(free_block):
    _, c_small = js.interval_constants(free_block, (0.5, 1.5))
    _, c_large = js.interval_constants(free_block, (0.2, 1.8))
    assert c_small >= c_large - 1e-12


def test_interval_constants_reject_band_edge(free_block):
    with pytest.raises(DegenerateBranchError):
        js.interval_constants(free_block, (1.5, 2.5))


def test_strip_bound_holds_on_finer_grid(free_block):
    iv = js.admissible_intervals(free_block, margin=0.1)[0]
    energies = np.linspace(iv.lo, iv.hi, 57)
    heights = iv.eps_I * 0.5 ** np.arange(5)
    for y in heights:
        for e in energies:
            z = js.floquet_eigenvalue(free_block, complex(e, y)).z
            assert abs(z) < 1.0
            assert abs(z) <= 1.0 - 0.9 * iv.C_I * y
