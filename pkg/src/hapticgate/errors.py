"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario configuration or parameter set is invalid."""


class FeasibilityError(RuntimeError):
    """A feasible-ball radius came out negative beyond numeric tolerance.

    Parameter validation makes this impossible for in-range gains, so seeing
    it means validation was bypassed or a caller fed inconsistent state.
    """
