"""Exception hierarchy."""


class BTAIError(Exception):
    """Base class for every error raised by this package."""


class ContractViolationError(BTAIError, ValueError):
    """An argument broke a shape, range or probability-simplex precondition."""


class ImpossibleEvidenceError(BTAIError, ValueError):
    """An observation has zero probability under the current beliefs."""


class InfiniteDivergenceError(BTAIError, ValueError):
    """KL divergence against a reference with zeros where the other has mass."""


class PlanningError(BTAIError, RuntimeError):
    """Action selection was requested from a tree that was never expanded."""


class ConfigError(BTAIError, ValueError):
    """Invalid benchmark or model configuration.

    ``key`` names the offending setting and ``line`` the config-file line
    number, when known.
    """

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
