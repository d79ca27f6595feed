class CrossPromptError(Exception):
    """Base class for every error raised by crossprompt."""


class DimensionError(CrossPromptError, ValueError):
    """Operand extents do not agree."""


class CapacityError(CrossPromptError, ValueError):
    """A sequence does not fit the backbone's position table."""


class ConfigurationError(CrossPromptError, ValueError):
    pass


class ContractError(CrossPromptError, RuntimeError):
    """A caller broke a documented precondition."""


class RangeError(CrossPromptError, IndexError):
    """An index or step lies outside its admissible range."""


class NonFiniteError(CrossPromptError, FloatingPointError):
    """A NaN or infinity reached a place where it must not propagate."""


class IntegrityError(CrossPromptError):
    """Stored content does not match its recorded checksum."""


class CompatibilityError(CrossPromptError, ValueError):
    """A prompt and a backbone disagree on the hidden size."""


class FormatError(CrossPromptError, ValueError):
    pass


class AggregationError(CrossPromptError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class CacheIOError(CrossPromptError, OSError):
    """Reading or writing a file failed; carries the offending path."""

    def __init__(self, path, reason):
        self.path = str(path)
        self.reason = reason
        super().__init__(f'{self.path}: {reason}')

    def __str__(self):
        return f'{self.path}: {self.reason}'
