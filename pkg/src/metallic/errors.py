"""Exception types shared across the package."""


class ExpressionSyntaxError(SyntaxError):
    """Malformed expression text; ``position`` is a 0-based character offset."""

    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.text = text
        self.position = position


class UnknownIdentifier(ValueError):
    def __init__(self, name):
        super().__init__(f"unknown identifier {name!r}")
        self.name = name


class DomainError(ArithmeticError):
    """Evaluation left the real domain of an operation (ln, sqrt, division, pow)."""


class SchemaError(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class DegenerateMetric(ArithmeticError):
    pass


class NegativeDiscriminant(ValueError):
    pass


class ZeroDiscriminant(ValueError):
    pass


class WrongDiscriminant(ValueError):
    pass


class NotNorden(ValueError):
    pass
