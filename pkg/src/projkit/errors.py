class ProjkitError(Exception):
    """Base class for toolkit errors."""


class UnknownPointError(ProjkitError, KeyError):
    pass


class DisconnectedError(ProjkitError):
    pass


class PreconditionError(ProjkitError):
    pass


class PartialActionError(ProjkitError):
    """An explicit automorphism table has no image for the requested point."""


class ParameterError(ProjkitError):
    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class AxiomPreconditionError(PreconditionError):
    def __init__(self, message, reports=()):
        super().__init__(message)
        self.reports = list(reports)


class ConstructionError(ProjkitError):
    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}
