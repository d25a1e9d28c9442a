"""Exception types shared across the package.

Every error carries a ``category`` string; the CLI prints it as the
machine-parsable prefix of its one-line failure message.
"""


class LBMError(Exception):
    category = "error"


class NoConvergence(LBMError):
    category = "no-convergence"


class NegativeWeight(LBMError):
    category = "negative-weight"


class SingularJacobian(LBMError):
    category = "singular-jacobian"


class NonPositiveDensity(LBMError):
    category = "non-positive-density"

    def __init__(self, message, node=None, step=None):
        super().__init__(message)
        self.node = node
        self.step = step

    def __str__(self):
        msg = super().__str__()
        if self.node is not None:
            msg += f" at node {tuple(int(i) for i in self.node)}"
        if self.step is not None:
            msg += f" (step {self.step})"
        return msg


class OffsetExceedsGrid(LBMError):
    category = "offset-exceeds-grid"


class VacuumFormation(LBMError):
    category = "vacuum"


class ConfigError(LBMError):
    category = "config-invalid"


class ConfigParseError(ConfigError):
    category = "config-parse"


class ConfigNotFound(ConfigError):
    category = "config-not-found"


class GridFileError(LBMError):
    category = "grid-file"
