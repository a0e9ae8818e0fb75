"""Exception hierarchy.

Input problems (bad files, too-short series, invalid parameters) derive from
:class:`InputError`; numerical failures on otherwise valid input derive from
:class:`NumericalError`. The CLI maps them to exit codes 1 and 2.
"""


class CrisisGCError(Exception):
    pass


class InputError(CrisisGCError, ValueError):
    pass


class NumericalError(CrisisGCError, ArithmeticError):
    pass


class NonPositivePrice(InputError):
    pass


class TooShort(InputError):
    pass


class SeriesShorterThanWindow(InputError):
    pass


class ParseError(InputError):
    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class EmptyEnsemble(InputError):
    pass


class ExcessiveMissingData(InputError):
    pass


class FieldLengthMismatch(InputError):
    pass


class OverlappingEpochs(InputError):
    pass


class RankDeficient(NumericalError):
    pass


class SingularRegression(NumericalError):
    pass


class ConstantInput(NumericalError):
    pass


class DegenerateDistances(NumericalError):
    pass
