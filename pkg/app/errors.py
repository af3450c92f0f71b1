from typing import Optional


class OpenWDVVError(Exception):
    """Base class for every error raised by the engine"""


class UnknownVariableError(OpenWDVVError):
    """A flat-variable index or name that is not declared"""


class MissingAssignmentError(OpenWDVVError):
    """Numeric evaluation without a value for every variable"""


class NotAntidifferentiableError(OpenWDVVError):
    """A term whose antiderivative leaves the coefficient ring"""

    def __init__(self, message: str, term: Optional[str] = None):
        super().__init__(message)
        self.term = term


class NotInvertibleError(OpenWDVVError):
    """Division by an element that is not a unit of the ring"""


class ExpansionError(OpenWDVVError):
    """A series expansion that cannot be carried out exactly"""


class ResidueDomainError(OpenWDVVError):
    """An integrand with poles the requested engine cannot see"""


class DegenerateCriticalPointError(OpenWDVVError):
    """Critical points of the superpotential are not simple"""


class NumericRefusal(OpenWDVVError):
    """The numeric engine declines a sample (clustered roots, poles nearby)"""


class IntegrabilityError(OpenWDVVError):
    """Third derivatives that are not derivatives of one potential"""

    def __init__(self, message: str, index: Optional[tuple] = None, difference: Optional[str] = None):
        super().__init__(message)
        self.index = index
        self.difference = difference


class IntegrationConstantError(OpenWDVVError):
    """Delta matrix that is not p-free, not symmetric or not integrable"""


class CatalogError(OpenWDVVError):
    """Unknown catalog family or invalid family parameter"""


class SpecParseError(OpenWDVVError):
    """Spec file or expression that does not parse"""

    def __init__(self, message: str, line: int = 0, column: int = 0, key: Optional[str] = None):
        location = f"line {line}, column {column}"
        if key:
            location = f"{key}: {location}"
        super().__init__(f"{location}: {message}")
        self.line = line
        self.column = column
        self.key = key
