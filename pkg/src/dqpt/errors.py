"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid user-facing configuration or operation preconditions."""


class NumericalFault(RuntimeError):
    """A numerical computation left its trusted regime (failed eigensolver,
    clamp beyond tolerance, divergent relative entropy)."""
