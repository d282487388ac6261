"""Error types shared across the stack."""


class SingularityError(RuntimeError):
    """Velocity IK asked to invert a singular system with zero damping."""


class DegenerateConfigurationError(ValueError):
    """Point correspondences too degenerate (collinear/coincident) to register."""


class RegistrationError(RuntimeError):
    """Registration solved but rejected (residual above the accept threshold)."""

    def __init__(self, residual: float, max_residual: float):
        super().__init__(
            f"registration residual {residual:.4f} m exceeds limit {max_residual:.4f} m"
        )
        self.residual = residual
        self.max_residual = max_residual


class NotAnchoredError(RuntimeError):
    """Operation requires an anchored operator-to-base transform."""


class ProtocolError(ValueError):
    """Malformed wire message; `field` names the offending part."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(message)
        self.field = field


class TrajectoryFormatError(ValueError):
    """Bad scripted-trajectory or demo file; carries the 1-based line number."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line
