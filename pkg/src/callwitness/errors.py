"""Exception taxonomy shared across the toolkit."""


class CallwitnessError(Exception):
    """Base class for every domain error raised by this package."""


class MalformedNameError(CallwitnessError):
    """A qualified-name string cannot be parsed for the given language."""


class SchemaViolationError(CallwitnessError):
    """callgraph.json bytes do not satisfy the canonical schema."""


class LanguageMismatchError(CallwitnessError):
    """Two values that must share a language do not."""


class UnsupportedConstructError(CallwitnessError):
    """Source uses a construct outside the traceable subset.

    Raised loudly instead of skipping: silent mis-instrumentation would
    corrupt ground truth.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingEntryPointError(CallwitnessError):
    """A Java compilation unit has no public static void main."""


class CompileFailureError(CallwitnessError):
    """Instrumented source no longer compiles/parses."""


class ToolchainMissingError(CallwitnessError):
    """A configured runtime tool does not exist or cannot be launched."""


class MissingGroundTruthError(CallwitnessError):
    """An operation that needs ground truth got an instance without it."""


class GenerationClientError(CallwitnessError):
    """The harness-generation client failed to produce a response."""


class NotCompilableError(CallwitnessError):
    """A generated harness failed the syntactic compilability check."""


class DegenerateStratumError(CallwitnessError):
    """A language stratum cannot approximate the requested test fraction."""


class NetworkError(CallwitnessError):
    """Repository-pool query failed at the transport level."""


class AuthError(CallwitnessError):
    """No API token configured for the repository-pool query."""


class RateLimitedError(CallwitnessError):
    """Repository-pool query kept hitting rate limits after backoff."""
