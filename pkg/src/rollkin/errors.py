"""Exception types shared across the package."""


class RollkinError(Exception):
    """Base class for all library errors."""


class OutOfDomain(RollkinError):
    """Parameter point lies outside the chart's rectangular domain."""

    def __init__(self, u, v, domain):
        self.u, self.v, self.domain = u, v, domain
        super().__init__(f"(u, v) = ({u}, {v}) outside domain {domain}")


class DegenerateChart(RollkinError):
    """|r_u x r_v| fell below the regularity threshold."""


class UmbilicInRegion(RollkinError):
    """A principal frame field was requested on a region containing umbilics."""


class SingularCurve(RollkinError):
    """Curve speed fell below the regularity threshold."""


class DomainExit(RollkinError):
    """An integration on a chart left the parameter domain."""

    def __init__(self, t, u, v, message=None):
        self.t, self.u, self.v = t, u, v
        super().__init__(message or f"left chart domain at t = {t} (u = {u}, v = {v})")


class StepFailure(RollkinError):
    """Step-halving did not bring the integration residual under tolerance."""


class NotRolling(RollkinError):
    """The existence condition for rolling fails somewhere on the contact curve."""

    def __init__(self, t, message=None):
        self.t = t
        super().__init__(
            message
            or f"normal curvature and geodesic torsion of both surfaces coincide at t = {t}"
        )


class NoCenter(RollkinError):
    """Instantaneous motion is a screw: no point is at rest."""


class BadDirections(RollkinError):
    """Fewer than three pairwise nonparallel directions supplied."""
