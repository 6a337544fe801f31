"""Exact computations in hopfological algebra over prime fields.

Finite-dimensional Hopf algebras ``H``, comodule algebras ``B``, the stable
category of B-modules modulo maps factoring through ``X (x) H``, and its
realization as bounded complexes modulo perfect ones.

Submodules:

``exactlin``
    linear algebra over GF(p)
``hopf``
    Hopf algebras, verification, integrals, builtins
``comod``
    comodule algebras, module algebras, smash products
``bmod``
    B-modules, morphisms, hom spaces, tensoring with H-modules
``stable``
    null-homotopic maps, stable homs, shifts, cones, conflations, triangles
``derived``
    complexes, homotopy homs, resolutions, Ext, the two-route Rickard check
``corpus``
    the example pairs ``(B, H)`` and seeded random generators
``workspace``, ``suites``, ``cli``
    file format, property suites and the ``hopfo`` command
"""

from __future__ import annotations

from . import bmod, comod, corpus, derived, exactlin, hopf, stable
from .bmod import BModule, ModuleMorphism
from .comod import ComoduleAlgebra, ModuleAlgebra
from .errors import (Check, ContractError, HopfologicalError, InternalError, ParameterError, Report,
                     StructuralError)
from .exactlin import GF, Field
from .hopf import HopfAlgebra, left_integral, verify_hopf

__version__ = "0.1.0"

__all__ = [
    "BModule",
    "Check",
    "ComoduleAlgebra",
    "ContractError",
    "Field",
    "GF",
    "HopfAlgebra",
    "HopfologicalError",
    "InternalError",
    "ModuleAlgebra",
    "ModuleMorphism",
    "ParameterError",
    "Report",
    "StructuralError",
    "bmod",
    "comod",
    "corpus",
    "derived",
    "exactlin",
    "hopf",
    "left_integral",
    "stable",
    "verify_hopf",
]
