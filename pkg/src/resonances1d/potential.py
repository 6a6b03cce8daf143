"""Compactly supported potentials on the line or the half-line.

A potential is stored as a list of polynomial pieces on consecutive
intervals ``[x_i, x_{i+1})``.  Each piece carries local power-basis
coefficients in ``t = x - x_i``; piecewise-constant potentials simply have
one coefficient per piece.  Outside ``[x_0, x_n]`` the potential is zero.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    BarrierOverlap,
    InputError,
    NonMonotoneKnots,
    NonPositiveBarrier,
    NonZeroEndpoints,
)

HALFLINE = "halfline"
FULLLINE = "fullline"
DIRICHLET = "dirichlet"
NEUMANN = "neumann"


@dataclass(frozen=True)
class Barrier:
    """Step ``V1 * 1_[A, B]`` appended to an interaction potential."""

    A: float
    B: float
    V1: float


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    breaks: np.ndarray
    coeffs: np.ndarray  # shape (n_pieces, degree + 1), ascending powers
    domain: str = FULLLINE
    bc: str | None = None
    barrier: Barrier | None = None
    bound: float = field(init=False)

    def __post_init__(self):
        breaks = _frozen(self.breaks)
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        coeffs = _frozen(coeffs)
        if breaks.ndim != 1:
            raise InputError("breaks must be one-dimensional")
        if len(breaks) == 1 or (len(breaks) == 0 and len(coeffs) != 0):
            raise InputError("need at least two breakpoints for a nonempty potential")
        if len(breaks) and len(coeffs) != len(breaks) - 1:
            raise InputError(f"{len(breaks)} breakpoints need {len(breaks) - 1} pieces, got {len(coeffs)}")
        if np.any(np.diff(breaks) <= 0):
            raise NonMonotoneKnots("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(breaks)) or not np.all(np.isfinite(coeffs)):
            raise InputError("non-finite potential data")
        if self.domain not in (HALFLINE, FULLLINE):
            raise InputError(f"unknown domain {self.domain!r}")
        if self.domain == HALFLINE:
            if self.bc not in (DIRICHLET, NEUMANN):
                raise InputError("half-line potentials need bc='dirichlet' or 'neumann'")
            if len(breaks) and breaks[0] < 0:
                raise InputError("half-line support must lie in [0, inf)")
        elif self.bc is not None:
            raise InputError("boundary condition only applies on the half-line")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "bound", _sup_norm(breaks, coeffs))

    @property
    def kind(self) -> str:
        if self.coeffs.shape[1] == 1 or not np.any(self.coeffs[:, 1:]):
            return "squarepot"
        return "splinepot"

    @property
    def is_piecewise_constant(self) -> bool:
        return self.kind == "squarepot"

    @property
    def support(self) -> tuple[float, float] | None:
        if len(self.breaks) == 0:
            return None
        return float(self.breaks[0]), float(self.breaks[-1])

    @property
    def values(self) -> np.ndarray:
        """Constant term of every piece (the heights for square potentials)."""
        return self.coeffs[:, 0]

    def pieces(self, start: float | None = None):
        """Yield ``(a, b, coeffs)`` for consecutive pieces.

        On the half-line a zero piece ``[0, x_0)`` is prepended when the
        support starts to the right of the origin.  ``start`` overrides the
        origin for that padding.
        """
        if start is None and self.domain == HALFLINE:
            start = 0.0
        if len(self.breaks) == 0:
            return
        if start is not None and start < self.breaks[0]:
            yield start, float(self.breaks[0]), np.zeros(1)
        for i in range(len(self.coeffs)):
            yield float(self.breaks[i]), float(self.breaks[i + 1]), self.coeffs[i]

    def __call__(self, x):
        return evaluate(self, x)

    def inner(self) -> "PotentialSpec":
        """The potential with its barrier removed (identity if none)."""
        if self.barrier is None:
            return self
        keep = self.breaks <= self.barrier.A
        nb = int(keep.sum())
        return PotentialSpec(self.breaks[:nb], self.coeffs[: max(nb - 1, 0)],
                             domain=self.domain, bc=self.bc)

    def digest(self) -> str:
        """Stable short hash of the potential data."""
        parts = [self.domain, str(self.bc), self.kind]
        parts += [format(v, ".17g") for v in self.breaks]
        parts += [format(v, ".17g") for v in self.coeffs.ravel()]
        if self.barrier is not None:
            parts += [format(v, ".17g") for v in (self.barrier.A, self.barrier.B, self.barrier.V1)]
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


def _sup_norm(breaks, coeffs) -> float:
    if len(coeffs) == 0:
        return 0.0
    if coeffs.shape[1] == 1:
        return float(np.max(np.abs(coeffs[:, 0])))
    best = 0.0
    for a, b, c in zip(breaks[:-1], breaks[1:], coeffs):
        poly = np.polynomial.Polynomial(c)
        crit = poly.deriv().roots()
        t = [0.0, b - a] + [r.real for r in crit if abs(r.imag) < 1e-12 and 0 < r.real < b - a]
        best = max(best, float(np.max(np.abs(poly(np.array(t))))))
    return best


def _eval_pieces(breaks, coeffs, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if len(coeffs) == 0:
        return out
    inside = (x >= breaks[0]) & (x < breaks[-1])
    xi = x[inside]
    idx = np.searchsorted(breaks, xi, side="right") - 1
    t = xi - breaks[idx]
    c = coeffs[idx]
    val = np.zeros_like(xi)
    for j in range(coeffs.shape[1] - 1, -1, -1):
        val = val * t + c[:, j]
    out[inside] = val
    return out


def evaluate(p: PotentialSpec, x):
    """Pointwise value of the potential; right-continuous at breakpoints."""
    scalar = np.ndim(x) == 0
    out = _eval_pieces(p.breaks, p.coeffs, np.atleast_1d(x))
    return float(out[0]) if scalar else out


def square_potential(values, breaks, domain=FULLLINE, bc=None) -> PotentialSpec:
    """Piecewise-constant potential: ``values[i]`` on ``[breaks[i], breaks[i+1])``."""
    values = np.atleast_1d(np.asarray(values, dtype=float))
    breaks = np.atleast_1d(np.asarray(breaks, dtype=float))
    if len(breaks) != len(values) + 1:
        raise InputError(f"{len(values)} heights need {len(values) + 1} breaks, got {len(breaks)}")
    return PotentialSpec(breaks, values[:, None], domain=domain, bc=bc)


def zero_potential(support=(0.0, 1.0), domain=FULLLINE, bc=None) -> PotentialSpec:
    return square_potential([0.0], list(support), domain=domain, bc=bc)


def spline_build(values, knots, domain=FULLLINE, bc=None) -> PotentialSpec:
    """Natural cubic spline through ``(knots, values)``, extended by zero."""
    values = np.asarray(values, dtype=float)
    knots = np.asarray(knots, dtype=float)
    if values.shape != knots.shape or len(knots) < 2:
        raise InputError("values and knots must have equal length >= 2")
    if np.any(np.diff(knots) <= 0):
        raise NonMonotoneKnots("knots must be strictly increasing")
    if values[0] != 0 or values[-1] != 0:
        raise NonZeroEndpoints("first and last spline values must be 0")
    if len(knots) == 2:
        coeffs = np.zeros((1, 4))
    else:
        cs = CubicSpline(knots, values, bc_type="natural")
        # scipy stores highest power first
        coeffs = cs.c[::-1].T.copy()
    return PotentialSpec(knots, coeffs, domain=domain, bc=bc)


def add_barrier(p: PotentialSpec, A: float, B: float, V1: float) -> PotentialSpec:
    """Return ``p + V1 * 1_[A, B]``; ``p`` must vanish on ``[A, inf)``."""
    if V1 <= 0:
        raise NonPositiveBarrier(f"barrier height must be positive, got {V1}")
    if not B > A:
        raise InputError(f"barrier needs B > A, got A={A}, B={B}")
    if p.barrier is not None:
        raise InputError("potential already has a barrier")
    sup = p.support
    if sup is not None and sup[1] > A:
        raise BarrierOverlap(f"support [{sup[0]}, {sup[1]}] reaches past A={A}")
    if p.domain == HALFLINE and A < 0:
        raise BarrierOverlap("barrier must lie in the half-line")
    width = p.coeffs.shape[1] if len(p.coeffs) else 1
    breaks = list(p.breaks)
    rows = [list(c) for c in p.coeffs]
    origin = 0.0 if p.domain == HALFLINE else A
    if not breaks:
        if origin < A:
            breaks, rows = [origin], [[0.0] * width]
        else:
            breaks = []
    elif breaks[-1] < A:
        rows.append([0.0] * width)
    if not breaks or breaks[-1] != A:
        breaks.append(A)
    barrier_row = [V1] + [0.0] * (width - 1)
    rows.append(barrier_row)
    breaks.append(B)
    return PotentialSpec(breaks, rows, domain=p.domain, bc=p.bc, barrier=Barrier(A, B, V1))


def scale(p: PotentialSpec, q: float) -> PotentialSpec:
    """The potential ``q**2 * p`` (support unchanged)."""
    if not q > 0:
        raise InputError(f"coupling q must be positive, got {q}")
    q2 = q * q
    barrier = None
    if p.barrier is not None:
        barrier = Barrier(p.barrier.A, p.barrier.B, p.barrier.V1 * q2)
    return PotentialSpec(p.breaks, p.coeffs * q2, domain=p.domain, bc=p.bc, barrier=barrier)
