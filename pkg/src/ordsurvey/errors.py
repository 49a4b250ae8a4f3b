class OrdSurveyError(Exception):
    """Base class for all errors raised by this package."""


class InputError(OrdSurveyError, ValueError):
    """Malformed or out-of-schema input data (CLI exit code 2)."""


class InsufficientData(OrdSurveyError, ValueError):
    """Not enough rows for the requested computation (CLI exit code 3)."""


class TooFewRows(InsufficientData):
    pass
