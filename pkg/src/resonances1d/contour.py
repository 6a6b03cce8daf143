"""Zeros of analytic functions in rectangles by the argument principle.

A box is split into quadrants until each holds at most one zero (counted
by the winding number of ``f`` along its boundary); isolated zeros are
then polished by Newton's method.  ``f`` must accept numpy arrays.
"""
from __future__ import annotations

import numpy as np

from .errors import ContourThroughZero

_JITTERS = (0.5, 0.4713, 0.5387, 0.4429, 0.5621)


def _edge_phase(f, z0, z1, n, depth=0):
    t = np.linspace(0.0, 1.0, n + 1)
    z = z0 + (z1 - z0) * t
    w = f(z)
    if not np.all(np.isfinite(w)) or np.any(w == 0):
        raise ContourThroughZero("function vanishes on the contour")
    dphi = np.angle(w[1:] / w[:-1])
    bad = np.abs(dphi) > np.pi / 4
    if not bad.any():
        return float(dphi.sum())
    if depth > 12 or abs(z1 - z0) / n < 1e-12 * max(1.0, abs(z0)):
        raise ContourThroughZero("phase jump does not resolve; zero on the contour")
    total = float(dphi[~bad].sum())
    for i in np.nonzero(bad)[0]:
        total += _edge_phase(f, z[i], z[i + 1], 8, depth + 1)
    return total


def winding_number(f, box, density=64) -> int:
    """Number of zeros (with multiplicity) of ``f`` inside ``box``."""
    x0, x1, y0, y1 = box
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        total += _edge_phase(f, a, b, density)
    count = total / (2 * np.pi)
    nearest = round(count)
    if abs(count - nearest) > 0.05:
        raise ContourThroughZero(f"non-integer winding number {count:.3f}")
    return int(nearest)


def newton(f, z, tol=1e-14, maxiter=60):
    """Newton iteration with a centred-difference derivative."""
    for _ in range(maxiter):
        h = 1e-6 * max(1.0, abs(z))
        fz, fp, fm = f(np.array([z, z + h, z - h]))
        deriv = (fp - fm) / (2 * h)
        if fz == 0:
            return z, True
        if deriv == 0:
            return z, False
        step = fz / deriv
        z = z - step
        if abs(step) <= tol * max(1.0, abs(z)):
            return z, True
    return z, False


def _split(box, jitter):
    x0, x1, y0, y1 = box
    xm = x0 + jitter * (x1 - x0)
    ym = y0 + jitter * (y1 - y0)
    return [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]


def _inside(z, box, pad=0.0):
    x0, x1, y0, y1 = box
    return x0 - pad <= z.real <= x1 + pad and y0 - pad <= z.imag <= y1 + pad


def find_zeros(f, region, density=64, min_size=1e-9, max_boxes=20_000) -> list[complex]:
    """All zeros of ``f`` in ``region = (re_lo, re_hi, im_lo, im_hi)``.

    Roots of multiplicity ``m`` are repeated ``m`` times.  The returned list
    is sorted by real then imaginary part.
    """
    region = tuple(map(float, region))
    stack = [(region, winding_number(f, region, density))]
    roots = []
    processed = 0
    while stack:
        box, count = stack.pop()
        processed += 1
        if processed > max_boxes:
            raise ContourThroughZero("zero search did not converge")
        if count == 0:
            continue
        x0, x1, y0, y1 = box
        size = max(x1 - x0, y1 - y0)
        if count == 1:
            z, ok = newton(f, complex((x0 + x1) / 2, (y0 + y1) / 2))
            if ok and _inside(z, box):
                roots.append(z)
                continue
        if size < min_size:
            z, _ = newton(f, complex((x0 + x1) / 2, (y0 + y1) / 2))
            roots.extend([z] * count)
            continue
        for jitter in _JITTERS:
            try:
                children = [(c, winding_number(f, c, density)) for c in _split(box, jitter)]
            except ContourThroughZero:
                continue
            if sum(c for _, c in children) == count:
                stack.extend(children)
                break
        else:
            raise ContourThroughZero(f"could not subdivide box {box}")
    return sorted(roots, key=lambda z: (z.real, z.imag))
