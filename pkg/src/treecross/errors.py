"""Exception types shared across the package."""


class TreecrossError(Exception):
    """Base class for all package-specific errors."""


class InvalidTreeError(TreecrossError, ValueError):
    """An edge list does not describe a labelled tree on 1..n."""


class GuardError(TreecrossError, ValueError):
    """An argument is outside the documented guard range of an operation.

    Guard rails (e.g. full enumeration only up to n = 7) are hard errors,
    never silent truncation.
    """


class RetryLimitError(TreecrossError, RuntimeError):
    """A rejection sampler hit its retry cap.

    Expected retries grow like n^2/4, so hitting the cap signals a bug
    rather than bad luck.
    """
