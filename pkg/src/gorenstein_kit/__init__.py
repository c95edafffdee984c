"""Exact algebra over finite local Gorenstein group rings (Z/p^m)[G].

Modules are finitely presented, ideals and submodules are kept as Howell
bases, and every construction can be cross-checked by enumeration on small
rings.
"""

from . import biduals, complexes, fitting, kolyvagin, limits, linalg, modules, ring, stark
from .biduals import BidualElement, ExteriorBidual, exterior_bidual, kernel_bidual_map, rank_reduce
from .complexes import QuadraticComplex, eagon_northcott, evaluation_ideal, extend_by_free, theta
from .fitting import annihilator_module, characteristic_ideal, fitting_ideal
from .kolyvagin import cofactor_iso, kolyvagin_combination, stabilizer_rearrangement_check
from .limits import ModuleTower, RingTower, fitting_tower_check, tor_transition_check, torsion_dual_check
from .modules import (
    ModuleElement, ModuleMap, PresentedModule, cyclic_module, dual, exterior_power, free_module,
    quotient_module,
)
from .ring import GorensteinRing, Ideal, RingElement, make_ring
from .stark import StarkFamily, StarkSystem, det_to_stark, stark_space, verify_core

__version__ = "0.1.0"

__all__ = [
    "biduals", "complexes", "fitting", "kolyvagin", "limits", "linalg", "modules", "ring", "stark",
    "BidualElement", "ExteriorBidual", "exterior_bidual", "kernel_bidual_map", "rank_reduce",
    "QuadraticComplex", "eagon_northcott", "evaluation_ideal", "extend_by_free", "theta",
    "annihilator_module", "characteristic_ideal", "fitting_ideal",
    "cofactor_iso", "kolyvagin_combination", "stabilizer_rearrangement_check",
    "ModuleTower", "RingTower", "fitting_tower_check", "tor_transition_check", "torsion_dual_check",
    "ModuleElement", "ModuleMap", "PresentedModule", "cyclic_module", "dual", "exterior_power",
    "free_module", "quotient_module",
    "GorensteinRing", "Ideal", "RingElement", "make_ring",
    "StarkFamily", "StarkSystem", "det_to_stark", "stark_space", "verify_core",
]
