"""Exact transfer matrices and secular functions.

Solutions of ``u'' = (V - lam**2) u`` are propagated as Cauchy data
``[u, u']``.  On a piece where ``V = c`` the propagator over a length ``l``
is the matrix of ``cosh``/``sinh`` of ``kappa*l`` with
``kappa**2 = c - lam**2``; its entries are even in ``kappa`` so the branch
of the square root never matters.

On the imaginary axis ``lam = i k`` this becomes ``u'' = (V + k**2) u``,
which is the setting of the bound/antibound conditions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .contour import find_zeros
from .errors import InputError, PoleAtEvaluationPoint, UnsupportedBody
from .potential import DIRICHLET, HALFLINE, PotentialSpec, scale

BOUND = "bound"
ANTIBOUND = "antibound"

_SERIES_CUTOFF = 1e-8  # |kappa*l|**2 below which the Taylor series is used
_ODE_RTOL = 1e-11


def segment_matrix(c, length, lam):
    """Propagator of ``[u, u']`` across a constant piece.

    Broadcasts over all arguments; the result has shape ``(..., 2, 2)``.
    """
    c, length, lam = np.broadcast_arrays(np.asarray(c, dtype=complex),
                                         np.asarray(length, dtype=float),
                                         np.asarray(lam, dtype=complex))
    if np.any(length < 0):
        raise InputError("segment length must be nonnegative")
    kappa2 = c - lam * lam
    z = kappa2 * length * length
    small = np.abs(z) < _SERIES_CUTOFF
    root = np.sqrt(np.where(small, 1.0, z))
    ch = np.where(small, 1 + z / 2 + z * z / 24, np.cosh(root))
    with np.errstate(invalid="ignore", divide="ignore"):
        shc = np.where(small, 1 + z / 6 + z * z / 120, np.sinh(root) / root)
    m = np.empty(z.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = ch
    m[..., 0, 1] = length * shc
    m[..., 1, 0] = kappa2 * length * shc
    m[..., 1, 1] = ch
    return m


def _require_constant(p: PotentialSpec):
    if not p.is_piecewise_constant:
        raise UnsupportedBody("transfer matrices need a piecewise-constant potential")


def propagate(p: PotentialSpec, lam, start: float | None = None):
    """Ordered product ``M_n ... M_1`` of the segment matrices of ``p``.

    On the half-line the product starts at the origin.  Broadcasts over
    ``lam``; the identity is returned for an empty potential.
    """
    _require_constant(p)
    lam = np.asarray(lam, dtype=complex)
    m = np.broadcast_to(np.eye(2, dtype=complex), lam.shape + (2, 2)).copy()
    for a, b, coef in p.pieces(start):
        m = segment_matrix(coef[0], b - a, lam) @ m
    return m


def initial_data(p: PotentialSpec):
    """Cauchy data at the left end for the half-line boundary condition."""
    if p.domain != HALFLINE:
        raise InputError("boundary data only exists on the half-line")
    return np.array([0.0, 1.0]) if p.bc == DIRICHLET else np.array([1.0, 0.0])


def _ode_piece(coef, a, b, k2, y0, with_norm):
    poly = np.polynomial.Polynomial(coef)

    def rhs(x, y):
        du = (k2 + poly(x - a)) * y[0]
        if with_norm:
            return [y[1], du, y[0] * y[0]]
        return [y[1], du]

    y0 = list(y0) + ([0.0] if with_norm else [])
    scale_ = max(abs(y0[0]), abs(y0[1]), 1e-300)
    sol = solve_ivp(rhs, (a, b), y0, method="DOP853", rtol=_ODE_RTOL,
                    atol=1e-14 * scale_)
    if not sol.success:
        raise PoleAtEvaluationPoint(f"ODE integration failed: {sol.message}")
    return sol.y[:, -1]


def _gauss_norm(c, length, k2, y0):
    """Integral of u**2 over a constant piece by Gauss-Legendre quadrature."""
    kl = np.sqrt(abs(c + k2)) * length
    n = 24 + 2 * int(np.ceil(kl))
    t, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * length * (t + 1)
    u = segment_matrix(c, x, 1j * np.sqrt(k2))[..., 0, :].real @ y0
    return 0.5 * length * float(w @ (u * u))


def cauchy_data(p: PotentialSpec, k: float, x_end: float, with_norm=False):
    """``(u, u')`` at ``x_end`` for ``u'' = (k**2 + V) u`` from the half-line BC.

    With ``with_norm`` the integral of ``u**2`` over ``[0, x_end]`` is
    appended.  Constant pieces use exact propagators, cubic pieces an
    adaptive Runge-Kutta integration of the linear system.
    """
    y = initial_data(p).astype(float)
    k2 = float(k) ** 2
    norm = 0.0
    x = 0.0
    for a, b, coef in p.pieces():
        if a >= x_end:
            break
        b = min(b, x_end)
        if len(coef) == 1 or not np.any(coef[1:]):
            if with_norm:
                norm += _gauss_norm(coef[0], b - a, k2, y)
            y = segment_matrix(coef[0], b - a, 1j * k)[...].real @ y
        else:
            res = _ode_piece(coef, a, b, k2, y, with_norm)
            y = res[:2]
            if with_norm:
                norm += res[2]
        x = b
    if x_end > x:
        if with_norm:
            norm += _gauss_norm(0.0, x_end - x, k2, y)
        y = segment_matrix(0.0, x_end - x, 1j * k).real @ y
    if with_norm:
        return y[0], y[1], norm
    return y[0], y[1]


def _check_pole(u, du):
    if abs(u) <= 1e-14 * abs(du):
        raise PoleAtEvaluationPoint("u vanishes at the evaluation point")


def riccati_v(p: PotentialSpec, k: float, x_end: float = 1.0) -> float:
    """Dirichlet-to-Neumann value ``v(x_end, k) = u'/u``."""
    if not k > 0:
        raise InputError("k must be positive")
    u, du = cauchy_data(p, k, x_end)
    _check_pole(u, du)
    return du / u


def riccati_v_dot(p: PotentialSpec, k: float, x_end: float = 1.0) -> float:
    """``dv/dk`` at ``x_end`` via ``2k / u**2 * int_0^x_end u**2``."""
    if not k > 0:
        raise InputError("k must be positive")
    u, du, norm = cauchy_data(p, k, x_end, with_norm=True)
    _check_pole(u, du)
    return 2 * k * norm / (u * u)


# --- bound / antibound conditions -------------------------------------------------

def _barrier_data(p: PotentialSpec, q: float):
    """Return ``(inner potential scaled by q**2, A, width, q**2 V1)``."""
    if p.domain != HALFLINE:
        raise InputError("axis states are defined for half-line problems")
    if p.barrier is None:
        inner = scale(p, q)
        sup = p.support
        edge = sup[1] if sup is not None else 0.0
        return inner, edge, 0.0, 0.0
    bar = p.barrier
    return scale(p.inner(), q), bar.A, bar.B - bar.A, q * q * bar.V1


def _exterior_slope(k, width, w1, kind):
    """``g`` with the condition ``v(A, k) + g(k) = 0``."""
    k = np.asarray(k, dtype=float)
    if w1 == 0.0:
        return k if kind == BOUND else -k
    k1 = np.sqrt(k * k + w1)
    r = k / k1
    beta = (1 - r) / (1 + r) if kind == BOUND else (1 + r) / (1 - r)
    e = beta * np.exp(-2 * k1 * width)
    return k1 * (1 - e) / (1 + e)


def beta_pm(k, k1):
    """The pair ``(beta_plus, beta_minus)``."""
    r = k / k1
    return (1 + r) / (1 - r), (1 - r) / (1 + r)


def exterior_gap(p: PotentialSpec, q: float, k):
    """``g_bound(k) - g_antibound(k)`` in a cancellation-free form.

    The two secular functions share ``v(A, k)``, so this is exactly the
    value of one of them at a root of the other.  With
    ``E = exp(-2 k1 (B - A))`` it equals
    ``2 k1 E (beta_plus - beta_minus) / ((1 + beta_minus E)(1 + beta_plus E))``,
    which stays accurate when ``E`` is far below machine epsilon.
    """
    _, _, width, w1 = _barrier_data(p, q)
    k = np.asarray(k, dtype=float)
    if w1 == 0.0:
        return 2 * k
    k1 = np.sqrt(k * k + w1)
    bp, bm = beta_pm(k, k1)
    e = np.exp(-2 * k1 * width)
    return 2 * k1 * e * (bp - bm) / ((1 + bm * e) * (1 + bp * e))


def _axis_data(inner: PotentialSpec, A: float, k):
    """Cauchy data at ``A`` for an array of ``k`` values."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if inner.is_piecewise_constant:
        y0 = initial_data(inner)
        m = propagate(inner, 1j * k)
        sup = inner.support
        end = sup[1] if sup is not None else 0.0
        if A > end:
            m = segment_matrix(0.0, A - end, 1j * k) @ m
        y = (m @ y0).real
        return y[:, 0], y[:, 1]
    data = np.array([cauchy_data(inner, kk, A) for kk in k])
    return data[:, 0], data[:, 1]


def axis_secular(p: PotentialSpec, q: float, k, kind: str):
    """``s(k) = v(A, k) + g(k)``; zeros are bound (``kind='bound'``) or
    antibound states.  Without a barrier ``g = +k`` or ``-k``.

    Accepts a scalar or an array of ``k``.
    """
    karr = np.asarray(k, dtype=float)
    if not np.all(karr > 0):
        raise InputError("k must be positive")
    inner, A, width, w1 = _barrier_data(p, q)
    u, du = _axis_data(inner, A, karr.ravel())
    for a, b in zip(u, du):
        _check_pole(a, b)
    s = (du / u + _exterior_slope(karr.ravel(), width, w1, kind)).reshape(karr.shape)
    return float(s) if s.ndim == 0 else s


def axis_diagnostic_F(p: PotentialSpec, q: float, k: float) -> float:
    """``v(A, k) / k1 + 1``, exponentially small at bound and antibound states."""
    inner, A, width, w1 = _barrier_data(p, q)
    u, du = _axis_data(inner, A, k)
    _check_pole(u[0], du[0])
    return float(du[0] / u[0] / np.sqrt(k * k + w1) + 1)


def _normalized_secular(inner, A, width, w1, k, kind):
    u, du = _axis_data(inner, A, k)
    g = _exterior_slope(k, width, w1, kind)
    return (du + g * u) / np.hypot(u, du)


@dataclass(frozen=True)
class AxisState:
    k: float
    kind: str
    residual: float


def default_k_max(p: PotentialSpec, q: float) -> float:
    inner = p.inner()
    return float(np.sqrt(inner.bound) * q * 1.1 + 5.0)


def find_axis_states(p: PotentialSpec, q: float, k_range=None, kind=BOUND,
                     points_per_decade: int = 2048) -> list[AxisState]:
    """All sign-changing zeros of the axis secular function in ``k_range``.

    The scan uses ``(u' + g u) / |(u, u')|``, which has the zeros of
    ``s = v + g`` but none of its poles.
    """
    if kind not in (BOUND, ANTIBOUND):
        raise InputError(f"unknown kind {kind!r}")
    if k_range is None:
        k_range = (1e-3, default_k_max(p, q))
    k_lo, k_hi = map(float, k_range)
    if not 0 < k_lo < k_hi:
        raise InputError("need 0 < k_lo < k_hi")
    inner, A, width, w1 = _barrier_data(p, q)
    n = max(int(np.ceil(points_per_decade * np.log10(k_hi / k_lo))), 16)
    grid = np.geomspace(k_lo, k_hi, n + 1)
    vals = _normalized_secular(inner, A, width, w1, grid, kind)

    def f(k):
        return float(_normalized_secular(inner, A, width, w1, k, kind)[0])

    states = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]:
        if vals[i] == 0 and i > 0 and vals[i - 1] == 0:
            continue
        a, b = grid[i], grid[i + 1]
        root = a if vals[i] == 0 else brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        if states and abs(root - states[-1].k) < 1e-13 * root:
            continue
        u, du = _axis_data(inner, A, root)
        s = du[0] / u[0] + float(_exterior_slope(root, width, w1, kind))
        states.append(AxisState(float(root), kind, abs(float(s))))
    return states


# --- complex secular function -----------------------------------------------------

def resonance_secular(p: PotentialSpec, lam):
    """``d(lam) = U' - i lam U`` at the right edge of the support.

    The solution starts purely outgoing on the left (``e^{-i lam x}``) or
    from the boundary condition on the half-line, so ``d`` vanishes exactly
    at resonances, bound states and antibound states.
    """
    _require_constant(p)
    lam = np.asarray(lam, dtype=complex)
    if p.domain == HALFLINE:
        y0 = np.broadcast_to(initial_data(p).astype(complex), lam.shape + (2,))
    else:
        y0 = np.stack([np.ones_like(lam), -1j * lam], axis=-1)
    if p.support is None:
        y = y0
    else:
        y = np.einsum("...ij,...j->...i", propagate(p, lam), y0)
    d = y[..., 1] - 1j * lam * y[..., 0]
    return d[()] if d.ndim == 0 else d


def find_resonances_secular(p: PotentialSpec, region, grid_density: int = 64,
                            exclude_radius: float = 1e-3) -> list[complex]:
    """Zeros of :func:`resonance_secular` inside ``region``.

    ``region`` is ``(re_lo, re_hi, im_lo, im_hi)`` and must stay clear of
    the disk of radius ``exclude_radius`` around the origin.
    """
    re_lo, re_hi, im_lo, im_hi = map(float, region)
    cx = min(max(0.0, re_lo), re_hi)
    cy = min(max(0.0, im_lo), im_hi)
    if np.hypot(cx, cy) <= exclude_radius:
        raise InputError("region must exclude a neighbourhood of the origin")
    return find_zeros(lambda z: resonance_secular(p, z), region, density=grid_density)


def secular_resonance_set(p: PotentialSpec, region, tol_axis: float = 1e-6,
                          grid_density: int = 64):
    """Zeros of ``d`` in ``region`` as a classified :class:`ResonanceSet`.

    The accuracy of each entry is the size of a final Newton step.
    """
    from .states import ResonanceSet

    zeros = find_resonances_secular(p, region, grid_density)
    acc = []
    for z in zeros:
        h = 1e-6 * max(1.0, abs(z))
        d0, dp, dm = resonance_secular(p, np.array([z, z + h, z - h]))
        deriv = (dp - dm) / (2 * h)
        acc.append(float(abs(d0 / deriv)) if deriv != 0 else float("inf"))
    return ResonanceSet.from_values(zeros, acc, engine="transfer",
                                    potential_hash=p.digest(), tol_axis=tol_axis)
