"""Exception hierarchy shared by all modules."""


class StsgError(Exception):
    """Base class for every error raised by stsgkit."""


class ParseError(StsgError):
    """Malformed text input; carries a 1-based line and column."""

    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(str(self))

    def __str__(self):
        where = [str(x) for x in (self.source, self.line, self.column) if x is not None]
        if where:
            return "%s: %s" % (":".join(where), self.message)
        return self.message


class GrammarError(StsgError):
    pass


class UnknownSymbol(GrammarError):
    pass


class UnknownTree(GrammarError):
    pass


class RootMismatch(GrammarError):
    pass


class NoOpenTree(GrammarError):
    pass


class IncompleteDerivation(GrammarError):
    pass


class DuplicateProduction(GrammarError):
    pass


class CyclicForest(StsgError):
    """The forest contains a unary cycle, so it encodes infinitely many derivations."""


class EmptyForest(StsgError):
    pass


class CapExceeded(StsgError):
    """More items than the enumeration cap; ``count`` is exact when known."""

    def __init__(self, cap, count=None, what="derivations"):
        self.cap = cap
        self.count = count
        self.what = what
        if count is None:
            msg = "more than %d %s" % (cap, what)
        else:
            msg = "%d %s exceed the cap of %d" % (count, what, cap)
        super().__init__(msg)


class InvalidFormula(StsgError):
    pass


class TooLarge(StsgError):
    pass
