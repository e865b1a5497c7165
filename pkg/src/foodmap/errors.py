"""Exception hierarchy.

``InputError`` subclasses mean the input files or arguments are bad (CLI exit
code 2); ``AnalysisError`` subclasses mean the inputs are fine but an analysis
cannot be carried out on them (CLI exit code 1).
"""


class FoodmapError(Exception):
    pass


class InputError(FoodmapError, ValueError):
    pass


class AnalysisError(FoodmapError):
    pass


class ParseError(InputError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"row {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DanglingReference(InputError):
    pass


class InvalidCoordinate(InputError):
    pass


class EmptyName(InputError):
    pass


class EmptyInput(InputError):
    pass


class SpanTooLarge(InputError):
    pass


class OutOfSpan(InputError):
    pass


class InvalidSpec(InputError):
    pass


class EmptySample(AnalysisError):
    pass


class TooFewPoints(AnalysisError):
    pass


class DegenerateSample(AnalysisError):
    pass


class GridTooLarge(AnalysisError):
    pass


class EmptyWindow(AnalysisError):
    pass


class InsufficientRows(AnalysisError):
    pass


class SingularDesignWarning(UserWarning):
    """Collinear regressors in a family fit; the pseudo-inverse solution was used."""
