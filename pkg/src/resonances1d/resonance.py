"""Bound/antibound symmetry under a barrier: pairing, q-scans, decay fits."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import transfer
from .errors import InputError, InsufficientData
from .potential import PotentialSpec, add_barrier, scale
from .spectral import default_mesh, filtered_eigenvalues
from .states import (ANTIBOUND, BOUND, RESONANCE, Entry, ResonanceSet, classify,
                     classify_all)

DEFAULT_K0 = 0.5
DEFECT_FLOOR = 1e-12


def pair_defects(bounds, antibounds, k0: float = 0.0):
    """Greedy nearest-neighbour pairing of bound and antibound moduli.

    Returns ``(pairs, unpaired_bounds, unpaired_antibounds)`` where each pair
    is ``(k_plus, k_minus, |k_plus - k_minus|)``.
    """
    if k0 < 0:
        raise InputError("k0 must be nonnegative")
    kb = [float(k) for k in bounds if k >= k0]
    ka = [float(k) for k in antibounds if k >= k0]
    cand = sorted((abs(b - a), i, j) for i, b in enumerate(kb) for j, a in enumerate(ka))
    used_b, used_a, pairs = set(), set(), []
    for d, i, j in cand:
        if i in used_b or j in used_a:
            continue
        used_b.add(i)
        used_a.add(j)
        pairs.append((kb[i], ka[j], d))
    pairs.sort()
    return (pairs,
            [k for i, k in enumerate(kb) if i not in used_b],
            [k for j, k in enumerate(ka) if j not in used_a])


@dataclass
class ScanRow:
    q: float
    bounds: list
    antibounds: list
    pairs: list

    @property
    def max_defect(self) -> float | None:
        if not self.pairs:
            return None
        return max(d for _, _, d in self.pairs)

    def branch_of(self, k_plus: float) -> int:
        """Index of a bound state counted from the ground state (largest k)."""
        return sorted(self.bounds, reverse=True).index(k_plus)

    def branch_defects(self) -> dict:
        return {self.branch_of(kp): d for kp, _, d in self.pairs}


@dataclass
class SymmetryScan:
    rows: list
    k0: float
    engine: str = "transfer"
    barrier: tuple | None = None
    fit: "DecayFit | None" = field(default=None)

    @property
    def q_values(self):
        return [r.q for r in self.rows]

    def branches(self, floor: float = DEFECT_FLOOR) -> dict:
        """``{branch: [(q, defect), ...]}`` for defects above ``floor``."""
        out: dict = {}
        for r in self.rows:
            for b, d in sorted(r.branch_defects().items()):
                if d > floor:
                    out.setdefault(b, []).append((r.q, d))
        return out


@dataclass(frozen=True)
class DecayFit:
    c_hat: float
    r2: float
    intercepts: dict
    power_r2: float
    n_points: int

    @property
    def symmetric(self) -> bool:
        """Exponential (not algebraic) decay of the symmetry defect."""
        return self.c_hat > 0 and self.r2 >= 0.5 and self.r2 > self.power_r2


def _states_transfer(p: PotentialSpec, q: float):
    kmax = transfer.default_k_max(p, q)
    rng = (1e-3, kmax)
    kb = [s.k for s in transfer.find_axis_states(p, q, rng, transfer.BOUND)]
    ka = [s.k for s in transfer.find_axis_states(p, q, rng, transfer.ANTIBOUND)]
    return kb, ka


def _states_spectral(p: PotentialSpec, q: float, order: int, tol_axis: float):
    pq = scale(p, q)
    rs = filtered_eigenvalues(pq, default_mesh(pq, order), tol_axis=tol_axis)
    kb = sorted(e.lam.imag for e in rs.of_class(BOUND))
    ka = sorted(-e.lam.imag for e in rs.of_class(ANTIBOUND))
    return kb, ka


def q_scan(v0: PotentialSpec, barrier=None, q_grid=(), k0: float = DEFAULT_K0,
           engine: str = "transfer", order: int = 24, tol_axis: float = 1e-6,
           max_workers: int | None = None) -> SymmetryScan:
    """Bound/antibound moduli of ``q**2 (V0 + W)`` for every q in ``q_grid``."""
    q_grid = [float(q) for q in q_grid]
    if not q_grid or any(q <= 0 for q in q_grid) or any(b <= a for a, b in zip(q_grid, q_grid[1:])):
        raise InputError("q_grid must be positive and strictly ascending")
    p = v0 if barrier is None else add_barrier(v0, *barrier)
    if engine == "transfer":
        def work(q):
            return _states_transfer(p, q)
    elif engine == "spectral":
        def work(q):
            return _states_spectral(p, q, order, tol_axis)
    else:
        raise InputError(f"unknown engine {engine!r}")

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            results = list(pool.map(work, q_grid))
    else:
        results = [work(q) for q in q_grid]

    rows = []
    for q, (kb, ka) in zip(q_grid, results):
        pairs, _, _ = pair_defects(kb, ka, k0)
        rows.append(ScanRow(q, kb, ka, pairs))
    scan = SymmetryScan(rows, k0, engine, tuple(barrier) if barrier is not None else None)
    try:
        scan.fit = fit_decay_rate(scan)
    except InsufficientData:
        scan.fit = None
    return scan


def _pooled_fit(groups: dict, transform):
    """Common slope, one intercept per group; r2 is the within-group r2."""
    keys = sorted(groups)
    rows, y, ss_within = [], [], 0.0
    for g in keys:
        ly = np.log([d for _, d in groups[g]])
        ss_within += float(np.sum((ly - ly.mean()) ** 2))
        for (q, _), val in zip(groups[g], ly):
            rows.append([transform(q)] + [1.0 if h == g else 0.0 for h in keys])
            y.append(val)
    X, y = np.array(rows), np.array(y)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    ss_res = float(np.sum((y - X @ coef) ** 2))
    r2 = 1.0 - ss_res / ss_within if ss_within > 0 else 0.0
    return float(-coef[0]), dict(zip(keys, map(float, coef[1:]))), r2


def fit_decay_rate(scan, floor: float = DEFECT_FLOOR) -> DecayFit:
    """Fit ``log(defect) = -c q + b`` with one ``b`` per tracked state.

    ``scan`` is a :class:`SymmetryScan` (states are tracked by their index
    from the ground state) or a plain sequence of ``(q, defect)`` pairs,
    treated as a single track.
    """
    if isinstance(scan, SymmetryScan):
        groups = scan.branches(floor)
    else:
        groups = {0: [(float(q), float(d)) for q, d in scan if d > floor]}
    groups = {g: pts for g, pts in groups.items() if len(pts) >= 2}
    n = sum(len(p) for p in groups.values())
    if n < 3:
        raise InsufficientData(f"need >= 3 tracked defects above {floor}, have {n}")
    c_hat, intercepts, r2 = _pooled_fit(groups, lambda q: q)
    _, _, power_r2 = _pooled_fit(groups, np.log)
    return DecayFit(c_hat, r2, intercepts, power_r2, n)


def is_decreasing(series, floor: float = DEFECT_FLOOR) -> bool:
    """True if each value is below its predecessor, or both are at the floor."""
    for (_, a), (_, b) in zip(series, series[1:]):
        if not (b < a or (a <= floor and b <= floor)):
            return False
    return True


__all__ = [
    "BOUND", "ANTIBOUND", "RESONANCE", "Entry", "ResonanceSet", "classify", "classify_all",
    "pair_defects", "q_scan", "fit_decay_rate", "SymmetryScan", "ScanRow", "DecayFit",
    "is_decreasing", "DEFAULT_K0",
]
