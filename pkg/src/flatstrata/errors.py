"""Exception types shared across the package.

Every domain failure raises one of these, so callers (and the CLI) can
distinguish bad input from genuine geometric obstructions.
"""


class FlatstrataError(Exception):
    """Base class for all library errors."""


# ---------------------------------------------------------------- strata


class OddTotalOrder(FlatstrataError):
    """Singularity orders must sum to an even number (2g - 2)."""


class NonPositiveOrder(FlatstrataError):
    """Order <= 0 supplied where a true cone point was required."""


class EmptyStratum(FlatstrataError):
    """Surface has no singularities and marked points were not allowed."""


# ---------------------------------------------------------------- construction


class NonMatchingSides(FlatstrataError):
    """Polygon side pairing does not identify sides by translation."""


class SelfIntersectingPolygon(FlatstrataError):
    """Polygon boundary is not simple (or could not be triangulated)."""


class NotTransitive(FlatstrataError):
    """Square permutation pair does not generate a connected surface."""


class ZeroAreaSurface(FlatstrataError):
    """Total area vanishes or a triangle is degenerate."""


class ParseError(FlatstrataError):
    """Malformed surface file."""


class InvalidSurface(FlatstrataError):
    """Surface file parsed but violates geometric invariants.

    Carries the ValidationReport as ``report``.
    """

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.violations))


# ---------------------------------------------------------------- geometry ops


class FlipBudgetExceeded(FlatstrataError):
    """Edge-flip loop did not reach a Delaunay state within budget."""


class NoSingularities(FlatstrataError):
    """Operation needs a nonempty singularity set."""


class BudgetExceeded(FlatstrataError):
    """Wedge-search node budget exhausted (radius too large for surface)."""


class TooLarge(FlatstrataError):
    """Exhaustive enumeration requested beyond the supported size."""


# ---------------------------------------------------------------- samplers


class RejectionCapExceeded(FlatstrataError):
    """Rejection sampler hit its proposal cap without enough accepts."""


class DegenerateChart(FlatstrataError):
    """Chart perturbation acceptance rate collapsed (box too large)."""


class ChartBreakdown(FlatstrataError):
    """Requested statistic is meaningless for the sampled chart."""


# ---------------------------------------------------------------- surgery


class NotEmbedded(FlatstrataError):
    """Region overlaps itself or touches a singularity."""


class CornerHitsSingularity(FlatstrataError):
    """A parallelogram corner landed on a vertex of the surface."""


class RichDiskUnavailable(FlatstrataError):
    """No embedded disk large enough to host the parallelogram."""


class ScalingUndefined(FlatstrataError):
    """Area rescaling factor is undefined for these parameters."""


class NoPreimage(FlatstrataError):
    """Inverse surgery obstruction.  ``mode`` names the failure:

    - ``non_unique``: the two shortest loops at the cone point are not unique,
    - ``intersecting``: the two loops cross away from the cone point,
    - ``area_excess``: gluing the parallelogram back exceeds the area bound.
    """

    def __init__(self, mode, message=""):
        self.mode = mode
        super().__init__(message or mode)


# ---------------------------------------------------------------- stats


class DegenerateFit(FlatstrataError):
    """Scaling-exponent fit impossible (zero counts or singular design)."""
