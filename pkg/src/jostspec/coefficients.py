"""Coefficient sequences: periodic backgrounds, perturbation families,
truncations, and variation norms.

All objects are frozen value types; evaluations are pure and cached, so
models can be shared freely between workers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CoefficientError, ValidationError

__all__ = [
    "PeriodicBlock",
    "PerturbationSpec",
    "CoefficientModel",
    "periodic_block",
    "make_model",
    "truncate",
    "q_variation_norm",
    "check_l2_cauchy",
]


@dataclass(frozen=True)
class PeriodicBlock:
    """Periodic background coefficients a°_1..a°_q, b°_1..b°_q.

    Indexing is 1-based and periodic; a°_0 is identified with a°_q.
    """

    q: int
    a_bg: tuple
    b_bg: tuple

    def a(self, n):
        """Background off-diagonal a°_n for n >= 0."""
        if n == 0:
            return self.a_bg[self.q - 1]
        return self.a_bg[(n - 1) % self.q]

    def b(self, n):
        """Background diagonal b°_n for n >= 1."""
        return self.b_bg[(n - 1) % self.q]


def periodic_block(q, a_bg, b_bg) -> PeriodicBlock:
    """Validate and build a periodic background block."""
    q = int(q)
    if q < 1:
        raise ValidationError(f"period must be >= 1, got {q}")
    a_bg = tuple(float(x) for x in a_bg)
    b_bg = tuple(float(x) for x in b_bg)
    if len(a_bg) != q or len(b_bg) != q:
        raise ValidationError(
            f"need exactly q={q} background coefficients, got {len(a_bg)} / {len(b_bg)}"
        )
    for k, x in enumerate(a_bg, start=1):
        if not np.isfinite(x) or x <= 0.0:
            raise ValidationError(f"a°_{k} must be positive, got {x}")
    if not all(np.isfinite(x) for x in b_bg):
        raise ValidationError("background diagonal must be finite")
    return PeriodicBlock(q, a_bg, b_bg)


@dataclass(frozen=True)
class PerturbationSpec:
    """Perturbation family added on top of the background.

    kinds:
      zero                         no perturbation
      finite_list                  explicit (alpha_n, beta_n) up to the support,
                                   exactly zero beyond
      power_decay_oscillatory      c * cos(n**s) / n**gamma applied to the
                                   target coefficient(s)

    l2_admissible is a declared flag for analytic families; it is
    sanity-checked empirically by check_l2_cauchy, not proven.
    """

    kind: str
    alpha: tuple = ()
    beta: tuple = ()
    c: float = 0.0
    s: float = 0.0
    gamma: float = 0.0
    target: str = "b"
    l2_admissible: bool = False

    @staticmethod
    def zero() -> "PerturbationSpec":
        return PerturbationSpec(kind="zero")

    @staticmethod
    def finite(alpha=(), beta=()) -> "PerturbationSpec":
        return PerturbationSpec(
            kind="finite_list",
            alpha=tuple(float(x) for x in alpha),
            beta=tuple(float(x) for x in beta),
        )

    @staticmethod
    def power(c, s, gamma, target="b", l2_admissible=False) -> "PerturbationSpec":
        if gamma <= 0:
            raise ValidationError("decay exponent gamma must be positive")
        if target not in ("a", "b", "both"):
            raise ValidationError(f"target must be 'a', 'b' or 'both', got {target!r}")
        return PerturbationSpec(
            kind="power_decay_oscillatory",
            c=float(c),
            s=float(s),
            gamma=float(gamma),
            target=target,
            l2_admissible=bool(l2_admissible),
        )


def _power_values(pert, n):
    # n: integer array >= 1
    nf = n.astype(np.float64)
    return pert.c * np.cos(nf**pert.s) / nf**pert.gamma


def _alpha_values(pert, n):
    out = np.zeros(n.shape, dtype=np.float64)
    if pert.kind == "finite_list" and pert.alpha:
        vals = np.asarray(pert.alpha)
        mask = n <= len(pert.alpha)
        out[mask] = vals[n[mask] - 1]
    elif pert.kind == "power_decay_oscillatory" and pert.target in ("a", "both"):
        out = _power_values(pert, n)
    return out


def _beta_values(pert, n):
    out = np.zeros(n.shape, dtype=np.float64)
    if pert.kind == "finite_list" and pert.beta:
        vals = np.asarray(pert.beta)
        mask = n <= len(pert.beta)
        out[mask] = vals[n[mask] - 1]
    elif pert.kind == "power_decay_oscillatory" and pert.target in ("b", "both"):
        out = _power_values(pert, n)
    return out


@dataclass(frozen=True)
class CoefficientModel:
    """Full coefficient sequences: background plus perturbation.

    a(n) is defined for n >= 0 (a(0) = a°_0, fixed convention); b(n) for
    n >= 1.  With truncation N set, a(n) = a°_n for n >= (N-1)q and
    b(n) = b°_n for n > (N-1)q, bypassing perturbation arithmetic entirely
    so the tail is bit-exact background.
    """

    block: PeriodicBlock
    pert: PerturbationSpec
    trunc: int | None = None

    def a(self, n):
        if n == 0:
            return self.block.a_bg[self.block.q - 1]
        arr_a, _ = self.coefficient_arrays(_round_up(n))
        return float(arr_a[n])

    def b(self, n):
        if n < 1:
            raise ValidationError("b(n) is defined for n >= 1")
        _, arr_b = self.coefficient_arrays(_round_up(n))
        return float(arr_b[n])

    def coefficient_arrays(self, n_top):
        """Site arrays (a[0..n_top], b[0..n_top]); b[0] is a placeholder."""
        return _cached_arrays(self, int(n_top))

    def fingerprint(self):
        """Stable short hash of the model parameters (used in CSV metadata)."""
        payload = repr((self.block, self.pert, self.trunc)).encode()
        return hashlib.sha256(payload).hexdigest()[:12]


def _round_up(n):
    # Scalar evaluations share cache entries by rounding the array length up.
    m = 64
    while m < n:
        m *= 2
    return m


@lru_cache(maxsize=32)
def _cached_arrays(model, n_top):
    block = model.block
    q = block.q
    a_bg = np.asarray(block.a_bg)
    b_bg = np.asarray(block.b_bg)

    n = np.arange(1, n_top + 1)
    idx = (n - 1) % q
    a = np.empty(n_top + 1)
    b = np.empty(n_top + 1)
    a[0] = block.a_bg[q - 1]
    b[0] = 0.0
    a[1:] = a_bg[idx]
    b[1:] = b_bg[idx]

    pert = model.pert
    if pert.kind != "zero" and n_top >= 1:
        pa = _alpha_values(pert, n)
        pb = _beta_values(pert, n)
        # Only touch sites the perturbation actually reaches; elsewhere the
        # background floats pass through untouched.
        if np.any(pa != 0.0):
            a[1:] = a[1:] + pa
        if np.any(pb != 0.0):
            b[1:] = b[1:] + pb

    if model.trunc is not None:
        n0 = (model.trunc - 1) * q
        if n0 <= n_top:
            tail = np.arange(max(n0, 1), n_top + 1)
            a[tail] = a_bg[(tail - 1) % q]
            if n0 == 0:
                a[0] = block.a_bg[q - 1]
        if n0 + 1 <= n_top:
            tail = np.arange(n0 + 1, n_top + 1)
            b[tail] = b_bg[(tail - 1) % q]

    bad = np.nonzero(a[1:] <= 0.0)[0]
    if bad.size:
        first = int(bad[0]) + 1
        raise CoefficientError(f"a({first}) = {a[first]} is not positive")

    a.flags.writeable = False
    b.flags.writeable = False
    return a, b


def make_model(block, pert=None) -> CoefficientModel:
    """Assemble a coefficient model from a background block and a perturbation."""
    if not isinstance(block, PeriodicBlock):
        raise ValidationError("block must be a PeriodicBlock")
    if pert is None:
        pert = PerturbationSpec.zero()
    if not isinstance(pert, PerturbationSpec):
        raise ValidationError("pert must be a PerturbationSpec")
    return CoefficientModel(block=block, pert=pert)


def truncate(model, N) -> CoefficientModel:
    """Model whose coefficients follow the input up to site (N-1)q and are
    exactly the periodic background beyond.  Idempotent for equal N."""
    N = int(N)
    if N < 1:
        raise ValidationError(f"truncation index must be >= 1, got {N}")
    if model.trunc == N:
        return model
    return CoefficientModel(block=model.block, pert=model.pert, trunc=N)


def q_variation_norm(model, n_max):
    """( sum_{n=1}^{n_max} |a(n+q)-a(n)|^2 + |b(n+q)-b(n)|^2 )^(1/2)."""
    n_max = int(n_max)
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    q = model.block.q
    a, b = model.coefficient_arrays(n_max + q)
    da = a[1 + q : n_max + q + 1] - a[1 : n_max + 1]
    db = b[1 + q : n_max + q + 1] - b[1 : n_max + 1]
    return float(np.sqrt(np.sum(da * da) + np.sum(db * db)))


def check_l2_cauchy(model, n_maxes=(10**3, 10**4, 10**5), tol=0.05):
    """Empirical Cauchy check for declared square-summable-variation families:
    successive q-variation partial norms over a doubling-type schedule must
    differ by less than tol."""
    norms = [q_variation_norm(model, n) for n in n_maxes]
    diffs = [abs(norms[i + 1] - norms[i]) for i in range(len(norms) - 1)]
    return all(d < tol for d in diffs)
