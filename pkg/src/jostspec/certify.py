"""Numerical certificates: strip eigenvalue bounds, square-summability of the
connection matrices, diagonal-product growth, and the three harmonic-function
hypotheses for the boundary factor.

Certificates fit their constants from probe data and test stability under
refinement; they are deterministic given (model, grid spec, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .jost import product_representation
from .transfer import RenormChain, floquet_eigenvalue

__all__ = [
    "CertReport",
    "check_floquet_bound",
    "check_w_summability",
    "check_diagonal_products",
    "check_harmonic_hypotheses",
]


@dataclass(frozen=True, eq=False)
class CertReport:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    grid_spec: str = ""
    worst_case: dict = field(default_factory=dict)


def check_floquet_bound(block, interval, grid=32) -> CertReport:
    """Verify |z(E+iy)| <= 1 - 0.9 C_I y and |z^{-1}(E+iy)| >= 1 + 0.9 C_I y
    on a grid over I x (0, eps_I].  The 0.9 slack absorbs the quadratic
    remainder of the linear strip bound."""
    c_i = interval.C_I
    eps = interval.eps_I
    energies = np.linspace(interval.lo, interval.hi, grid)
    heights = np.linspace(eps / grid, eps, grid)
    worst = {"margin": math.inf, "E": None, "y": None}
    slope_floor = math.inf
    for y in heights:
        bound_lo = 1.0 - 0.9 * c_i * y
        bound_hi = 1.0 + 0.9 * c_i * y
        for e in energies:
            fl = floquet_eigenvalue(block, complex(float(e), float(y)))
            margin = min(bound_lo - abs(fl.z), abs(fl.z_inv) - bound_hi)
            slope_floor = min(slope_floor, (1.0 - abs(fl.z)) / y)
            if margin < worst["margin"]:
                worst = {"margin": margin, "E": float(e), "y": float(y)}
    passed = worst["margin"] >= 0.0
    return CertReport(
        name="floquet_strip_bound",
        passed=passed,
        measured={
            "C_I": c_i,
            "eps_I": eps,
            "slope_floor_observed": slope_floor,
            "worst_margin": worst["margin"],
        },
        grid_spec=f"{grid}x{grid} probes over [{interval.lo}, {interval.hi}] x (0, {eps}]",
        worst_case=worst,
    )


def check_w_summability(model, zeta, n_grid, tol=0.05) -> CertReport:
    """Partial sums of ||W_n||_F^2 along a doubling grid: increments must be
    nonincreasing and the final increment below tol."""
    n_grid = sorted(int(m) for m in n_grid)
    if not n_grid or n_grid[0] < 1:
        raise ValidationError("n_grid must contain positive indices")
    m_max = n_grid[-1]
    chain = RenormChain(model, m_max + 1, zeta)
    cumulative = np.zeros(m_max + 1)
    run = 0.0
    for n in range(1, m_max + 1):
        run += chain.w_norm_sq(n)
        cumulative[n] = run
    partials = [float(cumulative[m]) for m in n_grid]
    increments = [b - a for a, b in zip(partials[:-1], partials[1:])]
    decreasing = all(
        increments[i + 1] <= increments[i] + 1e-12 for i in range(len(increments) - 1)
    )
    final_ok = (not increments) or increments[-1] < tol
    worst_inc = max(increments) if increments else 0.0
    return CertReport(
        name="w_square_summability",
        passed=decreasing and final_ok,
        measured={
            "l2_norm_estimate": math.sqrt(partials[-1]),
            "partial_sums": partials,
            "increments": increments,
        },
        grid_spec=f"partial sums at m in {n_grid}, zeta = {zeta}",
        worst_case={"largest_increment": worst_inc},
    )


def _sample_ranges(rng, count, n_max):
    ks = rng.integers(1, n_max - 1, size=count)
    ls = np.array([rng.integers(k + 1, n_max) for k in ks])
    return list(zip(ks.tolist(), ls.tolist()))


def _fit_diagonal_bound(chains, pairs):
    b_alpha = 0.0
    b_delta = 0.0
    for chain, cum_a, cum_d in chains:
        y = chain.zeta.imag
        for k, l in pairs:
            denom = 1.0 + y * math.sqrt(l - k)
            b_alpha = max(b_alpha, abs(cum_a[l] - cum_a[k - 1]) / denom)
            b_delta = max(b_delta, abs(cum_d[l] - cum_d[k - 1]) / denom)
    return b_alpha, b_delta


def check_diagonal_products(
    model, interval, eps_I=None, range_pairs=32, seed=0, n_blocks=128
) -> CertReport:
    """Fit the smallest B with |ln prod |1 + alpha_n|| <= B + B Im(zeta) sqrt(l-k)
    over sampled strip energies and index ranges (delta analog included);
    pass requires the fit to be finite and stable under doubling the sample."""
    eps = interval.eps_I if eps_I is None else float(eps_I)
    rng = np.random.default_rng(seed)
    energies = rng.uniform(interval.lo, interval.hi, size=4)
    heights = eps * 0.5 ** rng.uniform(0.0, 6.0, size=4)

    chains = []
    for e, y in zip(energies, heights):
        chain = RenormChain(model, n_blocks, complex(float(e), float(y)))
        ln_a = np.zeros(n_blocks)
        ln_d = np.zeros(n_blocks)
        for n in range(1, n_blocks):
            w11, _, _, w22 = chain.w_entries(n)
            ln_a[n] = math.log(abs(1.0 + w11))
            ln_d[n] = math.log(abs(1.0 + w22))
        # cum[j] = sum_{n<=j} ln|1 + alpha_n| with cum[0] = 0
        chains.append((chain, np.cumsum(ln_a), np.cumsum(ln_d)))

    pairs_small = _sample_ranges(rng, int(range_pairs), n_blocks - 1)
    pairs_large = pairs_small + _sample_ranges(rng, int(range_pairs), n_blocks - 1)
    b_small = _fit_diagonal_bound(chains, pairs_small)
    b_large = _fit_diagonal_bound(chains, pairs_large)

    def stable(u, v):
        if max(u, v) < 1e-12:
            return True
        return abs(v - u) <= 0.2 * max(u, abs(v), 1e-12)

    finite = all(math.isfinite(x) for x in (*b_small, *b_large))
    passed = finite and stable(b_small[0], b_large[0]) and stable(b_small[1], b_large[1])
    return CertReport(
        name="diagonal_product_bound",
        passed=passed,
        measured={
            "B_alpha": b_large[0],
            "B_delta": b_large[1],
            "B_alpha_half_sample": b_small[0],
            "B_delta_half_sample": b_small[1],
        },
        grid_spec=(
            f"{len(chains)} strip energies x {len(pairs_large)} index ranges, "
            f"{n_blocks} blocks, seed {seed}"
        ),
        worst_case={"B": max(b_large)},
    )


def _boundary_factor_values(model, N, points):
    """-ln |C_0 (lambda_0 phi_N + lambda_0^{-1} nu_N)| at the given energies."""
    out = np.empty(len(points))
    for i, zeta in enumerate(points):
        form = product_representation(model, N, zeta)
        val = form.c0 * (form.lambda0 * form.phi_N + form.nu_N / form.lambda0)
        out[i] = -math.log(abs(val))
    return out


def _harmonic_constants(model, N, interval, n_real=96, n_e=16):
    lo, hi, eps = interval.lo, interval.hi, interval.eps_I
    # (i) integral of the positive part on the real section
    egrid = np.linspace(lo, hi, n_real)
    f_real = _boundary_factor_values(model, N, [complex(e, 0.0) for e in egrid])
    c_plus = float(np.trapezoid(np.maximum(f_real, 0.0), egrid))
    # (ii) lower bound -C / Im zeta on the strip
    es = np.linspace(lo, hi, n_e)
    ys = eps * 0.5 ** np.arange(8)
    worst_lower = 0.0
    for y in ys:
        fvals = _boundary_factor_values(model, N, [complex(e, y) for e in es])
        worst_lower = max(worst_lower, float(np.max(-fvals * y)))
    # (iii) upper bound on the top quarter of the strip
    tops = np.linspace(0.75 * eps, eps, 4)
    c_top = -math.inf
    for y in tops:
        fvals = _boundary_factor_values(model, N, [complex(e, y) for e in es])
        c_top = max(c_top, float(np.max(fvals)))
    return c_plus, worst_lower, c_top


def check_harmonic_hypotheses(model, N, interval) -> CertReport:
    """Certify the three hypotheses on the boundary factor
    f_N = -ln |C_0 (lambda_0 phi_N + lambda_0^{-1} nu_N)|:
    (i) bounded integral of f_N^+ on I, (ii) f_N >= -C / Im zeta on the strip,
    (iii) f_N <= C on the top quarter of the strip; the fitted constants must
    be finite and stable (factor <= 2, small constants floored at 0.01) when
    N doubles."""
    cons_n = _harmonic_constants(model, N, interval)
    cons_2n = _harmonic_constants(model, 2 * N, interval)

    def ratio(u, v):
        fu, fv = max(u, 0.01), max(v, 0.01)
        return max(fu, fv) / min(fu, fv)

    ratios = [ratio(u, v) for u, v in zip(cons_n, cons_2n)]
    finite = all(math.isfinite(x) for x in (*cons_n, *cons_2n))
    passed = finite and all(r <= 2.0 for r in ratios)
    names = ("plus_part_integral", "strip_lower", "top_upper")
    measured = {}
    for key, u, v, r in zip(names, cons_n, cons_2n, ratios):
        measured[f"{key}_N{N}"] = u
        measured[f"{key}_N{2 * N}"] = v
        measured[f"{key}_ratio"] = r
    worst_idx = int(np.argmax(ratios))
    return CertReport(
        name="harmonic_hypotheses",
        passed=passed,
        measured=measured,
        grid_spec=(
            f"real 96 pts, strip 16x8 geometric, top 16x4 over "
            f"[{interval.lo}, {interval.hi}] x (0, {interval.eps_I}]; N in ({N}, {2 * N})"
        ),
        worst_case={"constant": names[worst_idx], "ratio": ratios[worst_idx]},
    )
