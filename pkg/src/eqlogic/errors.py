"""Exception hierarchy shared by every checker in the package."""


class EqlogicError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SyntaxError, EqlogicError):
    """Raised when input text does not tokenize or parse.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message: str, text: str = "", position: int = 0):
        super().__init__(f"{message} (at offset {position})")
        self.msg = message
        self.text = text
        self.position = position
        self.offset = position + 1


class GrammarError(ParseError):
    """Raised for well-tokenized input that falls outside the allowed fragment."""


class BudgetExceeded(EqlogicError):
    pass


class StateBlowup(BudgetExceeded):
    """Subset construction exceeded its configured budget."""


class _UnknownName(EqlogicError, KeyError):
    what = "name"

    def __str__(self) -> str:
        # KeyError would print the repr of the key
        return f"unknown {self.what} {self.args[0]!r}" if self.args else f"unknown {self.what}"


class UnknownPrimitive(_UnknownName):
    what = "primitive program"


class UnknownProposition(_UnknownName):
    what = "proposition"


class UnknownState(_UnknownName):
    what = "state"


class RichTestRejected(EqlogicError):
    """A test ``phi?`` contains a modality; only propositional tests are supported."""


class InternalError(EqlogicError, AssertionError):
    """A self-check failed. Indicates a bug, never a user error."""


class CorrespondenceViolation(InternalError):
    pass
