class ExdimError(Exception):
    """Base class for all errors raised by exdim."""


class MixedCategoryError(ExdimError):
    pass


class CapacityOverflow(ExdimError):
    pass


class ModelInconsistency(ExdimError):
    pass


class NoEnoughProjectives(ExdimError):
    pass


class HypothesisNotMet(ExdimError):
    pass


class NotExtensionClosed(ExdimError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class IncompleteIndecList(ExdimError):
    pass


class QuiverError(ExdimError):
    pass


class ParseError(ExdimError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.path = path
        self.line = line
