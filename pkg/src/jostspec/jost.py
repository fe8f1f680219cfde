"""Jost solutions of truncated operators, the boundary Green's function,
the absolutely-continuous density formula, and the block product
representation of the boundary pair (u_1, u_0)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .coefficients import truncate
from .errors import (
    BandEdgeError,
    DiagonalizationError,
    EigenvectorDegeneracyError,
    ValidationError,
    ZeroJostError,
)
from .transfer import RenormChain, discriminant, floquet_eigenvalue

__all__ = [
    "JostSolution",
    "ProductForm",
    "jost_solution",
    "recursion_residuals",
    "green_11",
    "ac_density",
    "wronskian_defect",
    "product_representation",
    "reconstruct_boundary_pair",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class JostSolution:
    """Decaying solution of the truncated eigenvalue recursion.

    u holds u_0 .. u_{Nq+1} scaled by 2**(-scale_log2); the boundary pair is
    (u_{Nq+1}, u_{Nq}) = (z - D, C) and the tail continues implicitly as
    u_{n+q} = z u_n.  scale_log2 is zero unless the overflow guard fired.
    """

    N: int
    zeta: complex
    u: np.ndarray
    z: complex
    scale_log2: int = 0

    @property
    def u0(self):
        return complex(self.u[0])

    @property
    def u1(self):
        return complex(self.u[1])

    def log_abs_u0(self):
        """ln |u_0| in true (unscaled) units."""
        return math.log(abs(self.u0)) + self.scale_log2 * LN2


def jost_solution(model, N, zeta, precision="double") -> JostSolution:
    """Backward recursion from the eigenvector boundary condition.

    The model is truncated at N internally; the boundary pair at sites
    (Nq+1, Nq) is the background Floquet eigenvector (z - D, C), and the
    three-term recursion is solved down to site 0.
    """
    if N < 1:
        raise ValidationError("truncation index must be >= 1")
    work = truncate(model, N)
    block = work.block
    q = block.q

    fl = floquet_eigenvalue(block, zeta)
    x, y = fl.eigvec
    if y == 0:
        raise EigenvectorDegeneracyError(f"C(zeta) = 0 at zeta = {zeta}")

    a, b = work.coefficient_arrays(N * q)
    if precision == "extended":
        u, scale = _kernels.jost_backward_longdouble(a, b, complex(zeta), x, y)
    else:
        u, scale = _kernels.jost_backward(a, b, complex(zeta), x, y)
    return JostSolution(N=N, zeta=complex(zeta), u=u, z=fl.z, scale_log2=int(scale))


def recursion_residuals(model, sol) -> np.ndarray:
    """Relative residual of the three-term recursion at each interior site."""
    work = truncate(model, sol.N)
    q = work.block.q
    a, b = work.coefficient_arrays(sol.N * q)
    u = sol.u
    n = np.arange(1, sol.N * q + 1)
    res = a[n] * u[n + 1] + (b[n] - sol.zeta) * u[n] + a[n - 1] * u[n - 1]
    scale = np.maximum.reduce([np.abs(u[n - 1]), np.abs(u[n]), np.abs(u[n + 1])])
    return np.abs(res) / np.where(scale > 0, scale, 1.0)


def green_11(model, N, zeta, precision="double"):
    """Boundary Green's value -u_1 / (a°_0 u_0) of the truncated operator."""
    sol = jost_solution(model, N, zeta, precision=precision)
    if sol.u0 == 0:
        raise ZeroJostError(f"u_0(zeta) = 0 at zeta = {zeta}")
    a0 = model.block.a(0)
    return -sol.u1 / (a0 * sol.u0)


def ac_density(model, N, energy, precision="double"):
    """Absolutely-continuous spectral density of the truncated operator at a
    real band-interior energy: |C Im z| / (pi |a°_0| |u_0|^2)."""
    energy = float(energy)
    block = model.block
    delta = discriminant(block, energy)
    if abs(delta) >= 2.0 - 1e-12:
        raise BandEdgeError(f"E = {energy} is not in a band interior")
    fl = floquet_eigenvalue(block, energy)
    c_val = fl.eigvec[1].real
    sol = jost_solution(model, N, energy, precision=precision)
    if sol.u0 == 0:
        raise ZeroJostError(f"u_0(E) = 0 at E = {energy}")
    a0 = block.a(0)
    if sol.scale_log2 == 0:
        return abs(c_val * fl.z.imag) / (math.pi * abs(a0) * abs(sol.u0) ** 2)
    log_val = (
        math.log(abs(c_val * fl.z.imag))
        - math.log(math.pi * abs(a0))
        - 2.0 * sol.log_abs_u0()
    )
    return math.exp(log_val) if log_val > -745.0 else 0.0


def wronskian_defect(model, N, energy):
    """Residual of the boundary identity Im(u_0 conj(u_1)) = -C Im z."""
    block = model.block
    fl = floquet_eigenvalue(block, float(energy))
    c_val = fl.eigvec[1].real
    sol = jost_solution(model, N, float(energy))
    cross = (sol.u0 * sol.u1.conjugate()).imag
    cross = math.ldexp(cross, 2 * sol.scale_log2)
    return abs(cross + c_val * fl.z.imag)


@dataclass(frozen=True, eq=False)
class ProductForm:
    """Boundary pair factored through the block eigenbases.

    prefactor = prod lambda_j (1 + alpha_j) over the interior connection
    steps; (prefactor, phi_N, nu_N) reconstruct (u_1, u_0) through
    M_0^{-1} U_0^{-1} L_0.  kappa is the observed eigenvalue-modulus floor.
    """

    prefactor: complex
    phi_N: complex
    nu_N: complex
    kappa: float
    log_prefactor: complex
    lambda0: complex
    a0: float
    u_inv0: np.ndarray = field(repr=False)

    @property
    def c0(self):
        """Corner entry C_0 of the first block (lower row of U_0^{-1} is a_0 C_0)."""
        return complex(self.u_inv0[1, 0]) / self.a0


def product_representation(model, N, zeta) -> ProductForm:
    """Evaluate the connection-matrix recursion
    Psi <- (I + W_n) Lambda_n Psi across blocks, dividing out
    lambda_n (1 + alpha_n) at each step so the normalized pair (phi_N, nu_N)
    and the log-space prefactor come out separately."""
    if N < 1:
        raise ValidationError("truncation index must be >= 1")
    work = truncate(model, N)
    chain = RenormChain(work, N, zeta)

    v0 = 1.0 + 0.0j
    v1 = 0.0j
    logpref = 0.0j
    for n in range(N - 1, 0, -1):
        lam = complex(chain.lam[n])
        w11, w12, w21, w22 = chain.w_entries(n)
        if w11 == 0 and w12 == 0 and w21 == 0 and w22 == 0:
            # diagonal step: dividing out lambda leaves phi untouched
            v1 = v1 / (lam * lam)
            logpref += cmath.log(lam)
            continue
        one_alpha = 1.0 + w11
        if one_alpha == 0:
            raise DiagonalizationError(
                f"1 + alpha_{n} = 0 at zeta = {zeta}", n=n, zeta=complex(zeta)
            )
        t0 = lam * v0
        t1 = v1 / lam
        n0 = one_alpha * t0 + w12 * t1
        n1 = w21 * t0 + (1.0 + w22) * t1
        denom = lam * one_alpha
        v0 = n0 / denom
        v1 = n1 / denom
        logpref += cmath.log(lam) + cmath.log(one_alpha)

    kappa = float(np.min(np.abs(chain.lam)))
    return ProductForm(
        prefactor=cmath.exp(logpref),
        phi_N=v0,
        nu_N=v1,
        kappa=kappa,
        log_prefactor=logpref,
        lambda0=complex(chain.lam[0]),
        a0=float(chain.a_nq[0]),
        u_inv0=chain.u_inv(0),
    )


def reconstruct_boundary_pair(form):
    """(u_1, u_0) from a ProductForm: prefactor * M_0^{-1} U_0^{-1} L_0 (phi, nu)."""
    w0 = form.lambda0 * form.phi_N
    w1 = form.nu_N / form.lambda0
    u = form.u_inv0
    u1 = complex(u[0, 0]) * w0 + complex(u[0, 1]) * w1
    u0 = (complex(u[1, 0]) * w0 + complex(u[1, 1]) * w1) / form.a0
    return form.prefactor * u1, form.prefactor * u0
