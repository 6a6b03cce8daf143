"""Classified eigenvalue sets shared by all engines."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Ambiguous, InputError

BOUND = "bound"
ANTIBOUND = "antibound"
RESONANCE = "resonance"
CLASSES = (BOUND, ANTIBOUND, RESONANCE)


def classify(lam: complex, tol_axis: float = 1e-6) -> str:
    """Bound (positive imaginary axis), antibound (negative), or resonance."""
    if not tol_axis > 0:
        raise InputError("tol_axis must be positive")
    lam = complex(lam)
    if abs(lam) <= tol_axis:
        raise Ambiguous(f"{lam} is within {tol_axis} of the origin")
    if abs(lam.real) <= tol_axis:
        if lam.imag > tol_axis:
            return BOUND
        if lam.imag < -tol_axis:
            return ANTIBOUND
    return RESONANCE


def classify_all(values, tol_axis: float = 1e-6) -> list[str]:
    return [classify(v, tol_axis) for v in values]


@dataclass(frozen=True)
class Entry:
    lam: complex
    cls: str
    accuracy: float = 0.0

    def __post_init__(self):
        if self.cls not in CLASSES:
            raise InputError(f"unknown class {self.cls!r}")
        if not self.accuracy >= 0:
            raise InputError("accuracy must be nonnegative")


@dataclass(frozen=True)
class ResonanceSet:
    entries: tuple = ()
    engine: str = "spectral"
    potential_hash: str = ""

    @classmethod
    def from_values(cls, values, accuracies=None, engine="spectral", potential_hash="",
                    tol_axis: float = 1e-6) -> "ResonanceSet":
        values = [complex(v) for v in values]
        if accuracies is None:
            accuracies = [0.0] * len(values)
        entries = [Entry(v, classify(v, tol_axis), float(a)) for v, a in zip(values, accuracies)]
        entries.sort(key=lambda e: (e.lam.real, e.lam.imag))
        return cls(tuple(entries), engine, potential_hash)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.lam for e in self.entries], dtype=complex)

    def of_class(self, cls: str) -> list[Entry]:
        return [e for e in self.entries if e.cls == cls]

    def window(self, window) -> "ResonanceSet":
        re_lo, re_hi, im_lo, im_hi = window
        kept = tuple(e for e in self.entries
                     if re_lo <= e.lam.real <= re_hi and im_lo <= e.lam.imag <= im_hi)
        return ResonanceSet(kept, self.engine, self.potential_hash)
