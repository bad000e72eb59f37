"""Orbit-depth invariants with exact nilpotent Lie calculus and numeric
Chen/Melnikov validation."""

from .words import Word, GroupMap, reduce, comm, conjugate, nested_commutator
from .series import NCSeries, TruncationContext, magnus, log_magnus, bch, shuffle
from .depth import ProblemInstance, compute_depth, DepthReport, brute_force_ch1
from .lattices import GradedLattice, torsion_invariants
from .chen import Poly2, OneForm, Path, chen_transport, iterated_integral, word_path
from .melnikov import (
    PlanarSystem,
    TransversalSpec,
    return_map,
    fit_melnikov,
    measure_melnikov,
    gelfand_leray,
    M2Construction,
)

__version__ = "0.1.0"
