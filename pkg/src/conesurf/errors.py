"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""


class ConeSurfError(Exception):
    code = "ERROR"

    def __init__(self, message, code=None, **details):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.details = details

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = self.details
        return out


class DomainError(ConeSurfError, ValueError):
    code = "DOMAIN_ERROR"


class DegenerateError(ConeSurfError, ValueError):
    code = "DEGENERATE"


class SurfaceError(ConeSurfError):
    """Rejected surface input (LENGTH_MISMATCH, OPEN_SURFACE, NON_MANIFOLD, ...)."""

    code = "SURFACE_ERROR"


class GeodesicError(ConeSurfError):
    code = "TANGENT_AT_VERTEX"


class FlipError(ConeSurfError):
    """BLOCKED_FLIP, DIAGONAL_TOO_LONG or FLIP_LIMIT_EXCEEDED."""

    code = "BLOCKED_FLIP"


class VoronoiError(ConeSurfError):
    code = "STAR_WALK_FAILURE"


class OracleError(ConeSurfError):
    code = "ORACLE_SIZE_GUARD"


class ScsParseError(ConeSurfError, ValueError):
    code = "SCS_SYNTAX"

    def __init__(self, message, line=None, code=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, code=code, line=line)
        self.line = line
