"""Chebyshev collocation of the outgoing-wave eigenvalue problem.

The quadratic problem ``(H_V - lam**2) u = 0`` with ``u' = +-i lam u`` at
the ends is linearized with ``psi = lam u`` into a pencil ``A x = lam B x``
on ``x = [u; psi]``.  Each subinterval of the mesh carries its own
Chebyshev-Gauss-Lobatto block; interface nodes are duplicated and glued
by continuity of ``u`` and ``u'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InputError, MeshMismatch, OrderTooSmall, SolverFailure
from .potential import DIRICHLET, FULLLINE, HALFLINE, PotentialSpec
from .states import ResonanceSet, classify_all

DEFAULT_ORDER = 24
DENSE_LIMIT = 3000
MIN_MESH_ORDER = 4

OUTGOING = "outgoing"
NEUMANN = "neumann"


@dataclass(frozen=True, eq=False)
class ChebBlock:
    nodes: np.ndarray
    D1: np.ndarray
    D2: np.ndarray

    @property
    def interval(self):
        return float(self.nodes[0]), float(self.nodes[-1])


def cheb_block(n: int, interval) -> ChebBlock:
    """Gauss-Lobatto nodes on ``interval`` (ascending) and derivative matrices."""
    a, b = map(float, interval)
    if n < 1:
        raise OrderTooSmall(f"Chebyshev order must be >= 1, got {n}")
    if not a < b:
        raise InputError(f"empty interval [{a}, {b}]")
    j = np.arange(n + 1)
    x = -np.cos(np.pi * j / n)  # ascending on [-1, 1]
    c = np.where((j == 0) | (j == n), 2.0, 1.0) * (-1.0) ** j
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    D *= 2.0 / (b - a)
    nodes = a + (b - a) * (x + 1) / 2
    nodes[0], nodes[-1] = a, b
    return ChebBlock(nodes, D, D @ D)


@dataclass(frozen=True)
class Mesh:
    intervals: tuple
    orders: tuple

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        orders = tuple(int(n) for n in self.orders)
        if not ivs or len(ivs) != len(orders):
            raise InputError("mesh needs one order per subinterval")
        for (a, b), (a2, _) in zip(ivs, ivs[1:]):
            if b != a2:
                raise InputError("mesh subintervals must be contiguous")
        if any(b <= a for a, b in ivs):
            raise InputError("mesh subintervals must have positive length")
        if min(orders) < MIN_MESH_ORDER:
            raise OrderTooSmall(f"mesh orders must be >= {MIN_MESH_ORDER}")
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "orders", orders)

    @property
    def endpoints(self):
        return [self.intervals[0][0]] + [b for _, b in self.intervals]

    @property
    def size(self) -> int:
        return sum(n + 1 for n in self.orders)

    def refined(self, factor: float = 1.5) -> "Mesh":
        return Mesh(self.intervals, tuple(math.ceil(factor * n) for n in self.orders))

    def blocks(self):
        return [cheb_block(n, iv) for n, iv in zip(self.orders, self.intervals)]


def default_mesh(p: PotentialSpec, order: int = DEFAULT_ORDER, max_length: float | None = None) -> Mesh:
    """One block per piece of ``p`` (split further if longer than ``max_length``)."""
    pts = [a for a, _, _ in p.pieces()] + ([p.support[1]] if p.support else [])
    if len(pts) < 2:
        raise InputError("potential has no support to mesh; give it an explicit interval")
    return Mesh(*_subdivide(pts, order, max_length))


def _subdivide(pts, order, max_length):
    intervals = []
    for a, b in zip(pts, pts[1:]):
        m = 1 if max_length is None else max(1, math.ceil((b - a) / max_length - 1e-12))
        edges = np.linspace(a, b, m + 1)
        edges[0], edges[-1] = a, b
        intervals += list(zip(edges[:-1], edges[1:]))
    return tuple(intervals), (order,) * len(intervals)


@dataclass(frozen=True)
class BoundaryScheme:
    left: str = OUTGOING  # outgoing | dirichlet | neumann
    right: str = OUTGOING  # outgoing | dirichlet


def scheme_for(p: PotentialSpec) -> BoundaryScheme:
    if p.domain == HALFLINE:
        return BoundaryScheme(left=p.bc, right=OUTGOING)
    return BoundaryScheme()


@dataclass(eq=False)
class PencilPair:
    A: np.ndarray
    B: np.ndarray
    row_map: list
    mesh: Mesh
    nodes: np.ndarray = field(repr=False)


def _check_mesh(p: PotentialSpec, mesh: Mesh):
    ends = np.array(mesh.endpoints)
    for x in [a for a, _, _ in p.pieces()] + ([p.support[1]] if p.support else []):
        if not np.any(np.abs(ends - x) <= 1e-12 * max(1.0, abs(x))):
            raise MeshMismatch(f"potential breakpoint {x} is not a mesh endpoint")
    lo, hi = ends[0], ends[-1]
    if p.support and (p.support[0] < lo - 1e-12 or p.support[1] > hi + 1e-12):
        raise MeshMismatch("mesh does not cover the support")
    if p.domain == HALFLINE and lo != 0.0:
        raise MeshMismatch("half-line mesh must start at 0")


def _assemble(mesh: Mesh, potential, scheme: BoundaryScheme) -> PencilPair:
    blocks = mesh.blocks()
    n = mesh.size
    A = np.zeros((2 * n, 2 * n), dtype=complex)
    B = np.zeros((2 * n, 2 * n), dtype=complex)
    row_map = ["domain-u"] * n + ["definition-psi"] * n
    nodes = np.concatenate([b.nodes for b in blocks])
    offsets = np.cumsum([0] + [len(b.nodes) for b in blocks])
    eye = np.arange(n)

    # H u - lam psi = 0 at every node; edge rows are overwritten below
    for blk, off in zip(blocks, offsets):
        m = len(blk.nodes)
        sl = slice(off, off + m)
        A[sl, sl] = -blk.D2 + np.diag(potential(blk.nodes))
    B[eye, n + eye] = 1.0
    # psi = lam u everywhere
    A[n + eye, n + eye] = 1.0
    B[n + eye, eye] = 1.0

    def reset(row):
        A[row, :] = 0.0
        B[row, :] = 0.0

    first, last = blocks[0], blocks[-1]
    r = 0
    reset(r)
    if scheme.left == OUTGOING:
        A[r, :len(first.nodes)] = first.D1[0]
        B[r, r] = -1j
        row_map[r] = "boundary-left"
    elif scheme.left == DIRICHLET:
        A[r, r] = 1.0
        row_map[r] = "boundary-left"
    elif scheme.left == NEUMANN:
        A[r, :len(first.nodes)] = first.D1[0]
        row_map[r] = "boundary-left"
    else:
        raise InputError(f"unknown left boundary {scheme.left!r}")

    r = n - 1
    reset(r)
    sl = slice(offsets[-2], offsets[-1])
    if scheme.right == OUTGOING:
        A[r, sl] = last.D1[-1]
        B[r, r] = 1j
    elif scheme.right == DIRICHLET:
        A[r, r] = 1.0
    else:
        raise InputError(f"unknown right boundary {scheme.right!r}")
    row_map[r] = "boundary-right"

    for j in range(len(blocks) - 1):
        left, right = blocks[j], blocks[j + 1]
        il = offsets[j + 1] - 1  # last node of block j
        ir = offsets[j + 1]  # first node of block j + 1
        reset(il)
        A[il, il] = 1.0
        A[il, ir] = -1.0
        row_map[il] = "junction-continuity-u"
        reset(ir)
        A[ir, offsets[j]:offsets[j + 1]] = left.D1[-1]
        A[ir, offsets[j + 1]:offsets[j + 2]] -= right.D1[0]
        row_map[ir] = "junction-continuity-du"
    return PencilPair(A, B, row_map, mesh, nodes)


def assemble_pencil(p: PotentialSpec, mesh: Mesh, bc: BoundaryScheme | None = None) -> PencilPair:
    """Two-field pencil for ``p`` on ``mesh`` with outgoing (or half-line) ends."""
    _check_mesh(p, mesh)
    return _assemble(mesh, p.__call__, bc or scheme_for(p))


@dataclass(eq=False)
class EigenResult:
    eigenvalues: np.ndarray
    vectors: np.ndarray | None
    residuals: np.ndarray
    n_infinite: int


def solve_pencil(pp: PencilPair, vectors: bool = True, dense_limit: int = DENSE_LIMIT,
                 infinite_tol: float = 1e-11) -> EigenResult:
    """All finite eigenvalues of ``A x = lam B x`` by the QZ algorithm."""
    A, B = pp.A, pp.B
    if A.shape[0] > dense_limit:
        raise SolverFailure(f"pencil of size {A.shape[0]} exceeds the dense limit {dense_limit}")
    E = _squared_form(A, B)
    if E is not None:
        return _solve_squared(A, B, E, vectors, infinite_tol)
    try:
        w, v = scipy.linalg.eig(A, B, right=True, homogeneous_eigvals=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        cond = np.linalg.cond(A)
        raise SolverFailure(f"QZ failed ({exc}); cond(A) = {cond:.3e}") from exc
    alpha, beta = w
    finite = np.abs(beta) > infinite_tol * np.abs(alpha)
    lam = alpha[finite] / beta[finite]
    x = v[:, finite]
    x = x / np.linalg.norm(x, axis=0)
    res = np.linalg.norm(A @ x - (B @ x) * lam, axis=0)
    return EigenResult(lam, x if vectors else None, res, int((~finite).sum()))


def _squared_form(A, B):
    """Diagonal of ``E`` if the pencil is ``[[H, 0], [0, I]] - lam [[0, E], [I, 0]]``.

    Such pencils (no boundary row depends on ``lam``) are equivalent to
    ``H u = mu E u`` with ``mu = lam**2``, which halves the QZ dimension.
    """
    n = A.shape[0] // 2
    eye = np.eye(n)
    E = B[:n, n:]
    e = np.diag(E)
    if (np.any(A[:n, n:]) or np.any(A[n:, :n]) or np.any(B[:n, :n]) or np.any(B[n:, n:])
            or not np.array_equal(A[n:, n:], eye) or not np.array_equal(B[n:, :n], eye)
            or not np.array_equal(E, np.diag(e)) or not np.all((e == 0) | (e == 1))):
        return None
    return E


def _solve_squared(A, B, E, vectors, infinite_tol):
    n = A.shape[0] // 2
    H = A[:n, :n]
    w, v = scipy.linalg.eig(H, E, right=True, homogeneous_eigvals=True)
    alpha, beta = w
    finite = np.abs(beta) > infinite_tol * np.abs(alpha)
    mu = alpha[finite] / beta[finite]
    root = np.sqrt(mu)
    lam = np.concatenate([root, -root])
    u = np.concatenate([v[:, finite], v[:, finite]], axis=1)
    x = np.vstack([u, u * lam])
    x = x / np.linalg.norm(x, axis=0)
    res = np.linalg.norm(A @ x - (B @ x) * lam, axis=0)
    return EigenResult(lam, x if vectors else None, res, 2 * int((~finite).sum()))


def match_eigenvalues(coarse, fine, tol: float, origin_cut: float = 1e-6):
    """Greedy nearest-neighbour pairing with relative tolerance ``tol``.

    Returns a list of ``(fine_value, |coarse - fine|)`` sorted by value.
    """
    coarse = np.asarray(coarse)[np.abs(coarse) >= origin_cut]
    fine = np.asarray(fine)[np.abs(fine) >= origin_cut]
    if len(coarse) == 0 or len(fine) == 0:
        return []
    dist = np.abs(coarse[:, None] - fine[None, :])
    ok = dist <= tol * np.maximum(np.abs(fine)[None, :], 1.0)
    ci, fi = np.nonzero(ok)
    order = np.argsort(dist[ci, fi], kind="stable")
    used_c, used_f, pairs = set(), set(), []
    for t in order:
        i, j = ci[t], fi[t]
        if i in used_c or j in used_f:
            continue
        used_c.add(i)
        used_f.add(j)
        pairs.append((complex(fine[j]), float(dist[i, j])))
    return sorted(pairs, key=lambda pr: (pr[0].real, pr[0].imag))


def in_window(lam, window) -> bool:
    if window is None:
        return True
    re_lo, re_hi, im_lo, im_hi = window
    return re_lo <= lam.real <= re_hi and im_lo <= lam.imag <= im_hi


def filtered_eigenvalues(p: PotentialSpec, mesh: Mesh | None = None, bc: BoundaryScheme | None = None,
                         match_tol: float = 1e-6, window=None, tol_axis: float = 1e-6,
                         engine: str = "spectral") -> ResonanceSet:
    """Eigenvalues that survive a 50% increase of every block order."""
    if mesh is None:
        mesh = default_mesh(p)
    coarse = solve_pencil(assemble_pencil(p, mesh, bc), vectors=False)
    fine = solve_pencil(assemble_pencil(p, mesh.refined(1.5), bc), vectors=False)
    return _to_set(match_eigenvalues(coarse.eigenvalues, fine.eigenvalues, match_tol),
                   window, tol_axis, engine, p.digest())


def _to_set(pairs, window, tol_axis, engine, digest) -> ResonanceSet:
    kept = [(lam, acc) for lam, acc in pairs if in_window(lam, window)]
    return ResonanceSet.from_values([lam for lam, _ in kept], [acc for _, acc in kept],
                                    engine=engine, potential_hash=digest, tol_axis=tol_axis)


def eigen_u_jumps(pp: PencilPair, x: np.ndarray):
    """Value and derivative jumps of the ``u`` part of ``x`` at each junction,
    relative to ``max |u|``."""
    blocks = pp.mesh.blocks()
    n = pp.mesh.size
    u = x[:n]
    offsets = np.cumsum([0] + [len(b.nodes) for b in blocks])
    scale_ = np.max(np.abs(u))
    jumps = []
    for j in range(len(blocks) - 1):
        ul = u[offsets[j]:offsets[j + 1]]
        ur = u[offsets[j + 1]:offsets[j + 2]]
        dv = abs(ul[-1] - ur[0]) / scale_
        dd = abs(blocks[j].D1[-1] @ ul - blocks[j + 1].D1[0] @ ur) / scale_
        jumps.append((dv, dd))
    return jumps


__all__ = [
    "ChebBlock", "Mesh", "BoundaryScheme", "PencilPair", "EigenResult", "cheb_block",
    "default_mesh", "assemble_pencil", "solve_pencil", "filtered_eigenvalues",
    "match_eigenvalues", "scheme_for", "eigen_u_jumps", "FULLLINE",
]
