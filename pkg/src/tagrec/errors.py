"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: UsageError -> 1, DataError (and
subclasses) -> 2, anything else -> 3.
"""


class TagrecError(Exception):
    """Base class for all package errors."""


class UsageError(TagrecError):
    """Bad command-line arguments or an inconsistent option combination."""


class DataError(TagrecError):
    """Problem with input data, on-disk artifacts, or their consistency."""


class UntrainableDocumentError(DataError):
    """A document yields an empty vocabulary and cannot be trained on."""


class BundleError(DataError):
    """A model bundle on disk is missing, corrupt, or inconsistent."""


class UnscorableTweetError(TagrecError):
    """No candidate hashtag shares any vocabulary with the tweet.

    Raised by scoring; batch drivers catch it and record a miss.
    """
