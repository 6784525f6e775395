"""Exception hierarchy shared by every module of the package."""


class PadicSimpsonError(Exception):
    """Base class for all domain errors raised by this package."""


class ContextMismatch(PadicSimpsonError):
    pass


class NotAUnit(PadicSimpsonError, ArithmeticError):
    pass


class SupportOverflow(PadicSimpsonError):
    pass


class ConvergenceViolation(PadicSimpsonError):
    pass


class UnsupportedRing(PadicSimpsonError):
    pass


class NotCommuting(PadicSimpsonError):
    """Two generator images fail to commute; indices are 1-based."""

    def __init__(self, i, j, witness=None):
        self.i, self.j, self.witness = i, j, witness
        super().__init__(f"NotCommuting({i},{j})")


class NotSmall(PadicSimpsonError):
    """Generator ``i`` (1-based) is not congruent to 1 (or 0) mod p."""

    def __init__(self, i, valuation=None):
        self.i, self.valuation = i, valuation
        super().__init__(f"NotSmall({i}): valuation {valuation}")


class HiggsConditionViolated(NotCommuting):
    def __init__(self, i, j, witness=None):
        super().__init__(i, j, witness)
        self.args = (f"HiggsConditionViolated({i},{j}): theta ^ theta != 0",)


class NotAMorphism(PadicSimpsonError):
    def __init__(self, index, side):
        self.index, self.side = index, side
        super().__init__(f"NotAMorphism: index {index} fails on the {side} side")


class SearchSpaceTooLarge(PadicSimpsonError):
    pass


class DescentStalled(PadicSimpsonError):
    def __init__(self, step, block=None, detail=""):
        self.step, self.block = step, block
        super().__init__(f"DescentStalled(s={step}) block={block} {detail}".rstrip())


class PrecisionExhausted(PadicSimpsonError):
    pass


class MalformedJob(PadicSimpsonError):
    pass
