"""Exception types shared across the package."""


class CpsurfError(Exception):
    """Base class for all errors raised by this library."""


class DivisionByZeroValue(CpsurfError):
    """Jet division or reciprocal hit a value coefficient below epsilon."""


class DomainError(CpsurfError):
    """Elementary function applied outside its smooth domain."""


class ParseError(CpsurfError):
    """Expression source could not be parsed.

    Attributes:
        offset: 1-based byte offset of the problem in the source text.
        expected: tuple of token descriptions that would have been accepted.
    """

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}"
                         + (f" (expected {', '.join(expected)})" if expected else ""))
        self.offset = offset
        self.expected = tuple(expected)


class EvaluationDomainError(CpsurfError):
    """Field evaluation left the domain of an elementary function, or |f| = 0."""


class UnboundParameter(EvaluationDomainError):
    """An expression references a parameter with no binding."""


class ZeroField(CpsurfError):
    """Operation requires |f| > 0 at the expansion point."""


class NotUnitary(CpsurfError):
    """Matrix fails the unitarity check."""


class DegeneratePoint(CpsurfError):
    """Operation requires a regular point (det G above tolerance)."""


class ZeroJL(DegeneratePoint):
    """Curvature formula needs J_L > 0 for the logarithmic derivative."""


class SingularPathPoint(CpsurfError):
    """Integration path crosses a point with det G below tolerance."""


class QuadratureNonConvergence(CpsurfError):
    """Panel refinement stopped above the requested tolerance."""


class GramSchmidtRankDeficiency(CpsurfError):
    """Orthogonalization produced the wrong number of normal vectors."""


class LinearSolveFailure(CpsurfError):
    """Tangential-coefficient linear system is singular."""


class VanishingCommutator(CpsurfError):
    """Tangent commutator too small to define a unit normal."""


class SingularGridPoint(CpsurfError):
    """Quadrature grid contains a degenerate point."""


class OddPanelCount(CpsurfError):
    """Composite Simpson quadrature needs even panel counts."""


class ConfigError(CpsurfError):
    """Run configuration is malformed or inconsistent."""
