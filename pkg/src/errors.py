"""
Error types shared across the recognition pipeline
"""


class HTRError(Exception):
    """Base class for all pipeline errors"""


class ShapeError(HTRError, ValueError):
    """Tensor dimensions do not fit the operation"""


class ContractError(HTRError, ValueError):
    """A precondition of an operation was violated"""


class ConfigError(HTRError, ValueError):
    """Invalid configuration value, model kind or decoder setting"""


class FeasibilityError(HTRError, ValueError):
    """A CTC label cannot be aligned to the available time steps"""


class EncodingError(HTRError, ValueError):
    """Text contains a symbol the charset does not know"""

    def __init__(self, char: str, position: int, charset_name: str = "charset") -> None:
        self.char = char
        self.position = position
        msg = f"Character {char!r} at position {position} is not in {charset_name}"
        super().__init__(msg)


class CheckpointError(HTRError):
    """Checkpoint bytes are malformed or of an unsupported version"""
