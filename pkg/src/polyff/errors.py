"""Exception hierarchy."""


class PolyffError(Exception):
    pass


# geometry
class GeometryError(PolyffError, ValueError):
    pass


class DegenerateChain(GeometryError):
    pass


class NotPlanar(GeometryError):
    pass


class NegativeWinding(GeometryError):
    pass


class InvalidMesh(GeometryError):
    pass


class InvalidSpec(GeometryError):
    pass


class InvalidPairing(GeometryError):
    pass


# evaluation
class EvaluationError(PolyffError, ArithmeticError):
    pass


class QParZero(EvaluationError):
    """In-plane wavevector component vanishes; closed form is singular."""


class QZero(EvaluationError):
    pass


class NotConverged(EvaluationError):
    pass


class SingularDenominator(EvaluationError):
    pass


# oracle
class BudgetExceeded(PolyffError, RuntimeError):
    pass


class NotStarShaped(PolyffError, ValueError):
    pass


# harness
class AllPairsDegenerate(PolyffError, ValueError):
    pass


class NotASymmetry(PolyffError, ValueError):
    pass
