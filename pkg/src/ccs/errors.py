"""Exception hierarchy shared across the package.

Two broad families matter to callers: ``UserInputError`` (bad request,
CLI exit code 1) and ``EnvironmentFailure`` (missing files, network,
misconfiguration; CLI exit code 2). Everything derives from ``CcsError``.
"""


class CcsError(Exception):
    """Base class for all package errors."""


class UserInputError(CcsError):
    """The caller supplied something invalid; retrying as-is will not help."""


class EnvironmentFailure(CcsError):
    """The surrounding environment (network, filesystem, services) failed."""


# --- query engine ---

class EmptyDisease(UserInputError):
    pass


class TermListUnavailable(EnvironmentFailure):
    pass


class InvalidQuery(UserInputError):
    pass


class DuplicateName(UserInputError):
    pass


class UnknownQuery(UserInputError):
    pass


# --- PubMed client ---

class NetworkError(EnvironmentFailure):
    pass


class QuotaExceeded(EnvironmentFailure):
    pass


class MalformedResponse(EnvironmentFailure):
    pass


class UnknownPmid(UserInputError):
    pass


class OfflineViolation(EnvironmentFailure):
    """Raised by the offline transport when anything tries to dial out."""


# --- text pipeline ---

class OverlapViolation(UserInputError):
    pass


# --- scoring / training ---

class DimensionMismatch(UserInputError):
    pass


class DegenerateData(UserInputError):
    pass


class ScorerUnavailable(EnvironmentFailure):
    pass


class EmptyArticle(UserInputError):
    pass


# --- evaluation harness ---

class LengthMismatch(UserInputError):
    pass


class MissingFiles(EnvironmentFailure):
    pass


class SchemaMismatch(EnvironmentFailure):
    pass


# --- pipeline service ---

class UnknownRun(UserInputError):
    pass
