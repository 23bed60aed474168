"""Exception hierarchy shared by all modules."""


class ShootbeamError(Exception):
    """Base class for errors raised by this package."""


class EllipticDomainError(ShootbeamError, ValueError):
    """Argument outside the domain of an elliptic integral or function."""


class NonConvergence(ShootbeamError):
    """A Newton iteration failed to reach its tolerance.

    ``element`` is filled in by the assembler when the failure happened
    inside an element-level shooting solve.
    """

    def __init__(self, iterations, residual, element=None, message=None):
        self.iterations = iterations
        self.residual = residual
        self.element = element
        if message is None:
            where = "" if element is None else f" in element {element}"
            message = (f"no convergence{where} after {iterations} iterations "
                       f"(residual {residual:.3e})")
        super().__init__(message)


class SingularJacobian(ShootbeamError):
    """A linear solve hit a singular matrix."""


class DegenerateState(ShootbeamError, ValueError):
    """End forces for which the general elliptic solution does not apply."""


class NoInflexion(ShootbeamError, ValueError):
    """The rotation field has no admissible inflexion point."""


class NoBuckling(ShootbeamError, ValueError):
    """The compressible column never loses stability for these stiffnesses."""


class ModelError(ShootbeamError, ValueError):
    """Invalid structural model or model file."""
