"""Exception types raised across the package."""


class SeqLocalError(ValueError):
    """Base class for validation failures (CLI maps these to exit code 2)."""


class EdgeListError(SeqLocalError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class DegenerateSizeError(SeqLocalError):
    """Graph too small (or too empty) for the requested statistic."""


class InfeasibleError(SeqLocalError):
    """Model parameters that admit no graph (e.g. simple-graph overflow)."""


class SizeCapError(SeqLocalError):
    """Exact computation would exceed the configured work cap."""


class NotSupportedError(SeqLocalError):
    pass
