"""Resonances, bound states and antibound states of compactly supported
one-dimensional Schroedinger operators."""
from .absorber import AbsorberSpec, reflection, rho
from .errors import ComputationError, InputError, ResonanceError
from .potential import (Barrier, PotentialSpec, add_barrier, evaluate, scale, spline_build,
                        square_potential, zero_potential)
from .resonance import DecayFit, SymmetryScan, fit_decay_rate, pair_defects, q_scan
from .spectral import Mesh, assemble_pencil, default_mesh, filtered_eigenvalues, solve_pencil
from .states import ANTIBOUND, BOUND, RESONANCE, Entry, ResonanceSet, classify
from .transfer import (find_axis_states, find_resonances_secular, propagate, resonance_secular,
                       riccati_v, riccati_v_dot, secular_resonance_set, segment_matrix)

__version__ = "0.1.0"

__all__ = [
    "AbsorberSpec", "reflection", "rho",
    "ComputationError", "InputError", "ResonanceError",
    "Barrier", "PotentialSpec", "add_barrier", "evaluate", "scale", "spline_build",
    "square_potential", "zero_potential",
    "DecayFit", "SymmetryScan", "fit_decay_rate", "pair_defects", "q_scan",
    "Mesh", "assemble_pencil", "default_mesh", "filtered_eigenvalues", "solve_pencil",
    "ANTIBOUND", "BOUND", "RESONANCE", "Entry", "ResonanceSet", "classify",
    "find_axis_states", "find_resonances_secular", "propagate", "resonance_secular",
    "riccati_v", "riccati_v_dot", "secular_resonance_set", "segment_matrix",
]
