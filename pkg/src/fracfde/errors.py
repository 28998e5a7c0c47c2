"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ArgumentRangeError(ValueError):
    """An argument is valid mathematically but outside the supported range."""


class SingularityError(DomainError):
    """Evaluation requested exactly at a non-removable singularity."""


class ResolutionError(ValueError):
    """The mesh is too coarse for the requested operation."""


class HypothesisError(RuntimeError):
    """A theorem-level hypothesis failed its runtime check.

    Carries ``condition``, the label of the violated hypothesis
    (e.g. ``"C1"``, ``"C2"``, ``"A"``..``"D"``, ``"monotonicity"``).
    """

    def __init__(self, condition: str, message: str):
        super().__init__(f"hypothesis {condition}: {message}")
        self.condition = condition


class ConfigError(ValueError):
    """A run configuration failed schema validation.

    ``location`` is a human-readable anchor (``file:line`` when known).
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
