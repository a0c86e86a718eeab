class QigError(ValueError):
    """Base class for every error raised by qig-kit.

    Subclasses ValueError so the routers can keep translating it into a 400.
    """


class DomainError(QigError):
    pass


class BoundaryError(QigError):
    pass


class RankError(QigError):
    pass


class GapGuardError(QigError):
    pass


class BrioschiSingularityError(QigError):
    pass


class GaugeUndefinedError(QigError):
    pass


class ParameterCountError(QigError):
    pass


class NormalizationError(QigError):
    pass


class StepSelectionError(QigError):
    pass


class CalibrationError(QigError):
    pass


def guard_cause(exc: BaseException) -> str:
    """Bucket a per-point failure for the scan accounting: "brioschi" or "gap".

    Boundary and rank failures leave the regular set, so they count against the gap guard.
    """
    if isinstance(exc, BrioschiSingularityError):
        return "brioschi"
    return "gap"
