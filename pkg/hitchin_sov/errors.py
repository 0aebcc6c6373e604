"""Exception hierarchy.

InputError subclasses describe bad input (the command line exits with 2),
NumericError subclasses a numerical or solver failure (exit 3).
"""

class SovError(Exception):
    exit_code = 1

class InputError(SovError):
    exit_code = 2

class NumericError(SovError):
    exit_code = 3


class ConfigError(InputError):
    pass

class ShapeMismatch(InputError):
    pass

class UnsupportedFamily(InputError):
    pass

class InvalidCurve(InputError):
    pass

class InvalidPoint(InputError):
    pass

class AtBranchPoint(InputError):
    pass

class PathBlocked(InputError):
    pass


class ZeroPolynomial(NumericError):
    pass

class DegenerateLeadingCoefficient(NumericError):
    pass

class ContinuationStalled(NumericError):
    pass

class QuadratureNotConverged(NumericError):
    pass

class SheetCollision(NumericError):
    pass

class DegenerateModel(NumericError):
    pass

class DegenerateDivisor(NumericError):
    pass

class NoSolution(NumericError):
    pass

class NewtonDiverged(NumericError):
    pass

class NearDiscriminant(NumericError):
    pass

class SheetMatchFailed(NumericError):
    pass

class InversionFailed(NumericError):
    pass

class FDUnstable(NumericError):
    pass

class ResidualCheckFailed(NumericError):
    pass
