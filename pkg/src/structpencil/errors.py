"""Exception types raised by the library."""

from __future__ import annotations


class StructPencilError(Exception):
    """Base class for all library errors."""


class InvalidPencil(StructPencilError, ValueError):
    """A block violates its symmetry or definiteness requirement."""


class InvalidQuery(StructPencilError, ValueError):
    """Eigenvalue or vector of a query is not admissible."""


class InvalidScope(StructPencilError, ValueError):
    """Requested perturbation scope is not supported for this operation."""


class NoSolution(StructPencilError):
    """A mapping problem has no solution.

    ``condition`` names the existence condition that failed and
    ``residual`` the measured violation.
    """

    def __init__(self, condition: str, residual: float, threshold: float):
        self.condition = condition
        self.residual = float(residual)
        self.threshold = float(threshold)
        super().__init__(
            f"mapping has no solution: condition '{condition}' violated "
            f"(residual {self.residual:.3e} > threshold {self.threshold:.3e})"
        )


class DegenerateInput(StructPencilError, ValueError):
    """An input vector that must be nonzero is zero."""


class RankDeficient(StructPencilError, ValueError):
    """A rank precondition of the real mapping problem fails."""


class Infeasible(StructPencilError):
    """The oracle found no feasible perturbation in the requested class."""


class EmptyKernel(StructPencilError):
    """A null space needed to draw an admissible query is trivial."""


class GenerationFailed(StructPencilError):
    """Random generation exhausted its redraw budget."""
