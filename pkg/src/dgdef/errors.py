"""Exception types raised by the exact DG-algebra machinery."""


class DgdefError(Exception):
    """Base class for all structured errors of this package."""


class DSquareNonzero(DgdefError):
    """The Leibniz extension of the differential does not square to zero."""

    def __init__(self, gen, defect):
        self.gen = gen
        self.defect = defect
        super().__init__(f"d(d({gen})) = {defect} != 0 after normal-form reduction")


class DegreeMismatch(DgdefError):
    pass


class NonpositiveViolation(DgdefError):
    pass


class MixedAlgebras(DgdefError):
    pass


class ChainMapFailure(DgdefError):
    """A generator assignment fails d∘f = f∘d; carries the witness."""

    def __init__(self, gen, defect):
        self.gen = gen
        self.defect = defect
        super().__init__(f"chain-map defect on {gen}: {defect}")


class NotFiniteDimensional(DgdefError):
    pass


class ResidueNotField(DgdefError):
    pass


class NotSurjective(DgdefError):
    pass


class SyzygyUnavailable(DgdefError):
    pass


class TruncationNotClosed(DgdefError):
    """The differential escapes the truncated basis; carries an escaping monomial."""

    def __init__(self, monomial, message="differential escapes the truncation"):
        self.monomial = monomial
        super().__init__(f"{message}: {monomial}")


class NotClosed(DgdefError):
    pass


class NotACocycle(DgdefError):
    pass


class NotFlatCertificate(DgdefError):
    pass


class ObstructionNotExact(DgdefError):
    """A lifting correction class is not exact within the truncation."""

    def __init__(self, element, message="obstruction class not exact within truncation"):
        self.element = element
        super().__init__(f"{message}: {element}")


class ReductionMismatch(DgdefError):
    pass


class NotSurjectiveBase(DgdefError):
    pass


class NotIdempotent(DgdefError):
    pass


class NotAlmostIdempotent(DgdefError):
    pass


class IdealNotSquareZero(DgdefError):
    pass


class DefectNotSolvable(DgdefError):
    pass


class NotTrivialIdempotent(DgdefError):
    pass


class CoefficientNotNilpotent(DgdefError):
    pass


class NotNilpotent(DgdefError):
    pass


class NotMC(DgdefError):
    pass


class MinorIdealMismatch(DgdefError):
    pass


class UnknownExample(DgdefError):
    pass


class ParseError(DgdefError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = "" if line is None else f" at line {line}" + ("" if column is None else f", column {column}")
        super().__init__(message + loc)
