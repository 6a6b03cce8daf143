"""Complex absorbing layers and their reflection coefficient.

Outside the physical region the equation is replaced by
``u'' + (lam**2 - W(x)) u = 0`` on ``(L, M)`` with an imaginary ramp
``W(x) = -i sigma ((x - L) / (M - L))**2``.  The outgoing/incoming
solutions ``gamma_+-`` launched at ``L`` determine the reflection
coefficient ``rho = -gamma_+(M) / gamma_-(M)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IncomingVanishes, InputError, MeshMismatch, ResonantDenominator
from .potential import HALFLINE, PotentialSpec
from .spectral import BoundaryScheme, Mesh, PencilPair, _assemble, _check_mesh

DEFAULT_SIGMA = 5.0
DEFAULT_WIDTH = 30.0
DEFAULT_BLOCK = 3.0  # longest collocation block inside the layer


@dataclass(frozen=True)
class AbsorberSpec:
    L: float = 0.0
    M: float = DEFAULT_WIDTH
    sigma: float = DEFAULT_SIGMA
    profile: str = "quadratic"

    def __post_init__(self):
        if not self.M > self.L:
            raise InputError("absorber needs M > L")
        if self.sigma < 0:
            raise InputError("absorber strength must be nonnegative")
        if self.profile != "quadratic":
            raise InputError(f"unknown absorber profile {self.profile!r}")

    @property
    def width(self) -> float:
        return self.M - self.L

    def W(self, x):
        """Absorbing term as a function of the distance-from-``L`` coordinate."""
        s = (np.asarray(x, dtype=float) - self.L) / self.width
        return -1j * self.sigma * s * s

    def moved(self, L: float) -> "AbsorberSpec":
        return AbsorberSpec(L, L + self.width, self.sigma, self.profile)


def _integrate(spec: AbsorberSpec, lam: complex, y0, rtol):
    lam2 = lam * lam

    def rhs(x, y):
        return [y[1], (spec.W(x) - lam2) * y[0]]

    sol = solve_ivp(rhs, (spec.L, spec.M), np.asarray(y0, dtype=complex), method="DOP853",
                    rtol=rtol, atol=1e-14 * max(1.0, abs(lam)), dense_output=False)
    if not sol.success:
        raise InputError(f"absorber integration failed: {sol.message}")
    return sol.y[:, -1]


def integrate_gamma(spec: AbsorberSpec, lam: complex, rtol: float = 1e-11, full: bool = False):
    """``(gamma_+(M), gamma_-(M))``; with ``full`` the derivatives follow."""
    lam = complex(lam)
    if lam == 0:
        raise InputError("lambda must be nonzero")
    gp = _integrate(spec, lam, [1.0, 1j * lam], rtol)
    gm = _integrate(spec, lam, [1.0, -1j * lam], rtol)
    if full:
        return gp[0], gm[0], gp[1], gm[1]
    return gp[0], gm[0]


def rho(spec: AbsorberSpec, lam: complex, rtol: float = 1e-11) -> complex:
    """Reflection coefficient of the layer."""
    gp, gm = integrate_gamma(spec, lam, rtol)
    if abs(gm) < 1e-14 * abs(gp):
        raise IncomingVanishes(f"gamma_-(M) vanishes at lambda={lam}")
    return -gp / gm


def lambda_hat(lam: complex, rho_val: complex) -> complex:
    """Effective spectral parameter ``lam (1 - rho) / (1 + rho)`` seen at ``L``."""
    if abs(1 + rho_val) < 1e-12:
        raise ResonantDenominator("rho is -1")
    return lam * (1 - rho_val) / (1 + rho_val)


@dataclass(frozen=True)
class ReflectionData:
    lam: complex
    gamma_plus_M: complex
    gamma_minus_M: complex
    rho: complex
    lambda_hat: complex


def reflection(spec: AbsorberSpec, lam: complex) -> ReflectionData:
    gp, gm = integrate_gamma(spec, lam)
    if abs(gm) < 1e-14 * abs(gp):
        raise IncomingVanishes(f"gamma_-(M) vanishes at lambda={lam}")
    r = -gp / gm
    return ReflectionData(complex(lam), gp, gm, r, lambda_hat(lam, r))


def capped_mesh(p: PotentialSpec, spec: AbsorberSpec, order: int = 24,
                layer_block: float = DEFAULT_BLOCK) -> Mesh:
    """Mesh of the physical pieces plus absorbing layers split into short blocks."""
    pts = [a for a, _, _ in p.pieces()] + [p.support[1]]
    lo, hi = pts[0], pts[-1]
    nlayer = max(1, math.ceil(spec.width / layer_block - 1e-12))
    right = list(np.linspace(hi, hi + spec.width, nlayer + 1)[1:])
    left = [] if p.domain == HALFLINE else list(np.linspace(lo - spec.width, lo, nlayer + 1)[:-1])
    pts = left + pts + right
    intervals = tuple(zip(pts[:-1], pts[1:]))
    return Mesh(intervals, (order,) * len(intervals))


def capped_pencil(p: PotentialSpec, spec: AbsorberSpec, mesh_ext: Mesh) -> PencilPair:
    """Pencil for ``-u'' + (V + W) u = lam**2 u`` with ``u = 0`` at the layer ends.

    The layer of ``spec`` is attached at the right edge of the support and
    mirrored onto the left edge for full-line problems.
    """
    if p.support is None:
        raise InputError("potential has no support")
    lo, hi = p.support
    if p.domain == HALFLINE:
        lo = 0.0
    right = spec.moved(hi)
    ends = mesh_ext.endpoints
    want_lo = lo if p.domain == HALFLINE else lo - spec.width
    if abs(ends[-1] - right.M) > 1e-9 or abs(ends[0] - want_lo) > 1e-9:
        raise MeshMismatch("extended mesh must span the physical region and both layers")
    _check_mesh(p, mesh_ext)

    def potential(x):
        x = np.asarray(x, dtype=float)
        v = p(x).astype(complex)
        v = np.where(x > hi, right.W(x), v)
        if p.domain != HALFLINE:
            v = np.where(x < lo, right.W(hi + (lo - x)), v)
        return v

    left = p.bc if p.domain == HALFLINE else "dirichlet"
    return _assemble(mesh_ext, potential, BoundaryScheme(left=left, right="dirichlet"))
