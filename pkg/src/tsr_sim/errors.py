"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: configuration problems
exit 2, numerical failures (no root, missing peaks, singular network,
zero sideband frequency) exit 3, and I/O problems exit 4.
"""


class TsrSimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TsrSimError):
    """Invalid or inconsistent run configuration.

    Carries the offending field path so CLI diagnostics can point at it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NoRootInBracket(TsrSimError):
    """The coupling-transmission phase condition has no solution in (0, 1)."""


class PeaksNotFound(TsrSimError):
    """Fewer than two local maxima detected in a response curve."""


class SingularSystem(TsrSimError):
    """The steady-state field equations are exactly degenerate."""


class DegenerateFrequency(TsrSimError):
    """Sideband frequency of zero: free-mass susceptibility diverges."""
