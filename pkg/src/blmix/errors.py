"""Exception hierarchy shared across the package."""


class BlmixError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(BlmixError, ValueError):
    """A parameter lies outside its admissible domain."""


class HorizonExceededError(BlmixError):
    """A distance profile was too short to reach the requested threshold."""

    def __init__(self, epsilon, d_last, t_max):
        self.epsilon = epsilon
        self.d_last = d_last
        self.t_max = t_max
        super().__init__(
            f"profile ends at t={t_max} with d={d_last:.6g} > epsilon={epsilon:.6g}"
        )


class InfeasibleSizeError(BlmixError):
    """The requested instance exceeds the exact-computation guard."""


class ConfigError(BlmixError, ValueError):
    """An experiment configuration is malformed or violates an invariant."""
