"""Exception types raised across the package."""


class RnaQuboError(Exception):
    """Base class; the CLI maps every subclass to a nonzero exit code."""


class InvalidBase(RnaQuboError, ValueError):
    def __init__(self, position: int, symbol: str):
        self.position = position
        self.symbol = symbol
        super().__init__(f"invalid base {symbol!r} at position {position}")


class MissingEntry(RnaQuboError, KeyError):
    def __str__(self):
        return f"no table entry for {self.args[0]!r}"


class DomainError(RnaQuboError, ValueError):
    pass


class LengthMismatch(RnaQuboError, ValueError):
    pass


class WrongWeightMode(RnaQuboError, ValueError):
    pass


class WrongCandidateKind(RnaQuboError, ValueError):
    pass


class ForbiddenLoop(RnaQuboError, ValueError):
    pass


class TooLarge(RnaQuboError, ValueError):
    pass


class ConflictingPairs(RnaQuboError, ValueError):
    def __init__(self, base: int):
        self.base = base
        super().__init__(f"base {base} is assigned two different partners")


class EmptySample(RnaQuboError, ValueError):
    pass


class MalformedRow(RnaQuboError, ValueError):
    def __init__(self, line_no: int, line: str, reason: str = ""):
        self.line_no = line_no
        self.line = line
        msg = f"malformed CT row at line {line_no}: {line!r}"
        super().__init__(f"{msg} ({reason})" if reason else msg)


class InconsistentPairing(RnaQuboError, ValueError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"base {i} pairs with {j} but {j} does not pair back")


class MissingFile(RnaQuboError, FileNotFoundError):
    def __str__(self):
        return f"no such file: {self.args[0]}"


class DuplicateId(RnaQuboError, ValueError):
    def __str__(self):
        return f"duplicate manifest id {self.args[0]!r}"
