import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

import jostspec as js
from conftest import random_block
from jostspec.errors import ValidationError


def test_tail_m_free_closed_form(free_block):
    m = js.tail_m_function(free_block, 1j)
    assert m == pytest.approx(1j * (np.sqrt(5) - 1) / 2, abs=1e-12)


def test_tail_m_near_axis_matches_density(free_block):
    m = js.tail_m_function(free_block, 1e-3j)
    assert m.imag == pytest.approx(1.0, abs=2e-3)


def test_tail_m_fixed_point_residual():
    rng = np.random.default_rng(9)
    for q in (1, 2, 3):
        block = random_block(rng, q)
        for zeta in (0.3 + 1e-2j, -0.7 + 1e-4j, 1j):
            m = js.tail_m_function(block, zeta)
            m_next = m
            for k in range(block.q, 0, -1):
                ak = block.a(k)
                m_next = 1.0 / (block.b(k) - zeta - ak * ak * m_next)
            assert abs(m - m_next) < 1e-13
            assert m.imag > 0


def test_tail_m_requires_upper_half_plane(free_block):
    with pytest.raises(ValidationError):
        js.tail_m_function(free_block, 0.5)


def test_oracle_equals_tail_without_perturbation(free_block):
    model = js.make_model(free_block)
    for n_trunc in (1, 3, 8):
        assert js.oracle_green_11(model, n_trunc, 1j) == pytest.approx(
            js.tail_m_function(free_block, 1j), abs=1e-13
        )


def test_oracle_matches_jost_green(acceptance_suite):
    for model, iv, n_trunc in acceptance_suite[:8]:
        zeta = complex(iv.midpoint(), 1e-3)
        g = js.green_11(model, n_trunc, zeta)
        og = js.oracle_green_11(model, n_trunc, zeta)
        assert abs(g - og) / abs(g) < 1e-8
        assert og.imag > 0


def test_oracle_equivalence_down_to_low_strips(acceptance_suite):
    for model, iv, n_trunc in acceptance_suite[:4]:
        for y in (1e-3, 1e-4):
            zeta = complex(iv.lo + 0.4 * iv.width, y)
            g = js.green_11(model, n_trunc, zeta)
            og = js.oracle_green_11(model, n_trunc, zeta)
            assert abs(g - og) / abs(g) < 1e-8


def test_density_curve_free_key_formula(free_model):
    iv = js.admissible_intervals(free_model.block, margin=0.1)[0]
    curve = js.density_curve(free_model, 4, iv, 101, method="key_formula")
    reference = np.sqrt(4 - curve.grid**2) / (2 * np.pi)
    assert np.max(np.abs(curve.values - reference)) < 1e-8
    assert curve.meta["method"] == "key_formula"


def test_density_curve_free_oracle(free_model):
    iv = js.admissible_intervals(free_model.block, margin=0.1)[0]
    curve = js.density_curve(free_model, 4, iv, 101, method="oracle")
    reference = np.sqrt(4 - curve.grid**2) / (2 * np.pi)
    assert np.max(np.abs(curve.values - reference)) < 1e-5


def test_density_methods_cross_agree(acceptance_suite):
    model, iv, n_trunc = acceptance_suite[0]
    key = js.density_curve(model, n_trunc, iv, 60, method="key_formula")
    orc = js.density_curve(model, n_trunc, iv, 60, method="oracle")
    assert np.max(np.abs(key.values - orc.values) / key.values) < 1e-5


def test_density_curve_rejects_unknown_method(free_model):
    with pytest.raises(ValidationError):
        js.density_curve(free_model, 4, (-1.0, 1.0), 11, method="fancy")


def test_entropy_free_reference(free_model):
    nodes, weights = leggauss(64)
    reference = float(
        np.sum(weights * np.log(np.sqrt(4 - nodes**2) / (2 * np.pi)))
    )  # interval [-1, 1]: no affine rescale needed
    value = js.entropy_integral(free_model, 5, (-1.0, 1.0), quad_order=64)
    assert value == pytest.approx(reference, abs=1e-8)


def test_entropy_continuity_in_perturbation_size(free_block):
    base = np.array([0.3, -0.25, 0.2, 0.1])
    clean = js.entropy_integral(js.make_model(free_block), 8, (-1.5, 1.5))
    gaps = []
    for scale in (1.0, 0.5, 0.25):
        model = js.make_model(free_block, js.PerturbationSpec.finite(beta=scale * base))
        val = js.entropy_integral(model, 8, (-1.5, 1.5))
        gaps.append(abs(val - clean))
    assert gaps[0] > gaps[1] > gaps[2]


def test_entropy_quadrature_converged(free_model):
    v32 = js.entropy_integral(free_model, 5, (-1.0, 1.0), quad_order=32)
    v64 = js.entropy_integral(free_model, 5, (-1.0, 1.0), quad_order=64)
    assert abs(v64 - v32) < 1e-6


def test_moment_free_catalan(free_model):
    assert js.moment(free_model, None, 2, 8) == 1.0
    assert js.moment(free_model, None, 4, 8) == 2.0
    assert js.moment(free_model, None, 6, 8) == 5.0
    for k in (1, 3, 5, 7):
        assert js.moment(free_model, None, k, 12) == 0.0


def test_moment_against_dense_matrix():
    rng = np.random.default_rng(3)
    block = random_block(rng, 2)
    pert = js.PerturbationSpec.finite(alpha=rng.uniform(-0.1, 0.1, 6), beta=rng.uniform(-0.2, 0.2, 6))
    model = js.make_model(block, pert)
    depth = 12
    a, b = model.coefficient_arrays(depth)
    dense = np.diag(b[1 : depth + 1]) + np.diag(a[1:depth], 1) + np.diag(a[1:depth], -1)
    for k in range(0, 9):
        power = np.linalg.matrix_power(dense, k)
        assert js.moment(model, None, k, depth) == pytest.approx(power[0, 0], rel=1e-12)


def test_moment_depth_validation(free_model):
    with pytest.raises(ValidationError):
        js.moment(free_model, None, 4, 5)


def test_moment_truncation_invisible_beyond_radius(acceptance_suite):
    for model, _, _ in acceptance_suite[:6]:
        q = model.block.q
        for k in range(0, 9):
            n_trunc = (k + 1) // q + 3  # (N-1)q > k+1
            assert js.moment(model, n_trunc, k, k + 2) == js.moment(model, None, k, k + 2)
