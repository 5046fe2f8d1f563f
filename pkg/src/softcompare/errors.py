"""Exception hierarchy shared by every module in the package."""


class SoftCompareError(Exception):
    """Base class; ``code`` is the machine-readable error name used by the CLI."""

    code = "Error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class ValidationError(SoftCompareError, ValueError):
    code = "ValidationError"


class EmptyFocalSet(ValidationError):
    code = "EmptyFocalSet"


class MassSumViolation(ValidationError):
    code = "MassSumViolation"


class UnknownLabel(ValidationError):
    code = "UnknownLabel"


class SubnormalPossibility(ValidationError):
    code = "SubnormalPossibility"


class NotFuzzy(ValidationError):
    code = "NotFuzzy"


class MismatchedObjectCount(SoftCompareError, ValueError):
    code = "MismatchedObjectCount"


class UnknownKind(SoftCompareError, ValueError):
    code = "UnknownKind"


class UnknownTNorm(UnknownKind):
    code = "UnknownTNorm"


class EmptySet(SoftCompareError, ValueError):
    code = "EmptySet"


class OutOfRange(SoftCompareError, ValueError):
    code = "OutOfRange"


class BaseNotNormalized(SoftCompareError, ValueError):
    code = "BaseNotNormalized"


class DegenerateData(SoftCompareError, ValueError):
    code = "DegenerateData"


class BudgetExceeded(SoftCompareError, RuntimeError):
    """An exact computation would enumerate more items than allowed.

    ``count`` is the number of items the computation would have touched;
    ``suggested_samples`` is a sample size for the approximate route.
    """

    code = "BudgetExceeded"

    def __init__(self, what, count, budget, suggested_samples=None):
        self.what = what
        self.count = count
        self.budget = budget
        self.suggested_samples = suggested_samples
        msg = f"{what}: enumeration count {_fmt_count(count)} exceeds budget {budget}"
        if suggested_samples is not None:
            msg += f"; use sampling instead (e.g. --mode sample --samples {suggested_samples})"
        super().__init__(msg)

    def to_dict(self):
        d = super().to_dict()
        d.update(count=_fmt_count(self.count), budget=self.budget,
                 suggested_samples=self.suggested_samples)
        return d


class ParseError(SoftCompareError, ValueError):
    code = "ParseError"

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class NonNumericFeature(ParseError):
    code = "NonNumericFeature"


class SchemaError(SoftCompareError, ValueError):
    code = "SchemaError"


def _fmt_count(count):
    # counts can be astronomically large python ints
    if count < 10**15:
        return int(count)
    s = str(count)
    return f"{s[0]}.{s[1:4]}e{len(s) - 1}"
