"""Planar geometrically exact beam frames solved element by element with a shooting method."""

from .errors import (DegenerateState, EllipticDomainError, ModelError, NoBuckling, NoInflexion,
                     NonConvergence, ShootbeamError, SingularJacobian)
from .element import (EndForces, LocalEndDisplacements, SectionProperties, ShootingConfig,
                      integrate, jacobian, solve_end_forces)
from .transform import ElementGeometry, GlobalEndForces, GlobalNodeState, tangent_stiffness
from .solver import (Constraint, DofMap, ElementSpec, Model, NodalLoad, SolverConfig,
                     run_analysis)
from .model_io import parse_model

__version__ = "0.1.0"

__all__ = [
    "DegenerateState", "EllipticDomainError", "ModelError", "NoBuckling", "NoInflexion",
    "NonConvergence", "ShootbeamError", "SingularJacobian",
    "EndForces", "LocalEndDisplacements", "SectionProperties", "ShootingConfig",
    "integrate", "jacobian", "solve_end_forces",
    "ElementGeometry", "GlobalEndForces", "GlobalNodeState", "tangent_stiffness",
    "Constraint", "DofMap", "ElementSpec", "Model", "NodalLoad", "SolverConfig", "run_analysis",
    "parse_model",
]
