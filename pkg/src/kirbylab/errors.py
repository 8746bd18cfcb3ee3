"""Exception hierarchy shared by every module."""


class KirbyError(Exception):
    """Base class for all engine errors."""


# lattice
class DefiniteInput(KirbyError):
    pass


class ParityMismatch(KirbyError):
    pass


class DegenerateSpan(KirbyError):
    pass


# handles
class InvalidMove(KirbyError):
    pass


class LabelClash(KirbyError):
    pass


class UnknownHandle(KirbyError):
    pass


class UnknownBasis(KirbyError):
    pass


class MissingClass(KirbyError):
    pass


class MixedRepresentation(KirbyError):
    pass


class NotExceptional(KirbyError):
    pass


class NonUnitLinking(KirbyError):
    pass


class MissingAssumptionToken(KirbyError):
    pass


class NoSuchOneHandle(KirbyError):
    pass


class NotClosed(KirbyError):
    pass


class DanglingOneHandles(KirbyError):
    pass


class UnknownLinking(KirbyError):
    """A computation needed a linking number the data model does not know."""


# rbd
class BadP(KirbyError):
    pass


class EmbeddingInvalid(KirbyError):
    pass


# cork
class EmbeddingTokensInvalid(KirbyError):
    pass


# script
class ScriptError(KirbyError):
    pass


class ScriptSyntaxError(ScriptError):
    def __init__(self, line, column, expected, found=None):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.found = found
        want = ", ".join(self.expected) or "end of line"
        got = f", found {found!r}" if found is not None else ""
        super().__init__(f"line {line}, column {column}: expected {want}{got}")


class DuplicateLabel(ScriptError):
    def __init__(self, line, column, label):
        self.line = line
        self.column = column
        self.label = label
        super().__init__(f"line {line}, column {column}: duplicate handle label {label!r}")


class UnknownStatement(ScriptError):
    def __init__(self, line, column, word):
        self.line = line
        self.column = column
        self.word = word
        super().__init__(f"line {line}, column {column}: unknown statement {word!r}")
