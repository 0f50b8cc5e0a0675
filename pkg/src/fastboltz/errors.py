"""Exception types shared across the solvers and the CLI."""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration (CLI exit code 2)."""


class NumericalFailure(RuntimeError):
    """NaN/overflow detected during a solve (CLI exit code 3)."""


class VerificationFailure(RuntimeError):
    """An acceptance-style report did not pass (CLI exit code 4)."""
