"""Exception types shared across the scanner."""


class SeqscanError(Exception):
    """Base class for all scanner errors."""


class ArchiveCorrupt(SeqscanError):
    """The archive could not be decoded as tar.gz/tgz/zip/whl."""


class ArchiveTooLarge(SeqscanError):
    """Decompressed size exceeds the configured cap."""


class ManifestUnparseable(SeqscanError):
    """Manifest file exists but cannot be parsed (scan continues with empty manifest)."""


class EmptyClass(SeqscanError):
    """Training corpus is missing one of the two labels."""


class BadOrder(SeqscanError):
    """N-gram order outside the supported 1..5 range."""


class LengthMismatch(SeqscanError):
    """Predictions and labels differ in length."""


class IoFailure(SeqscanError):
    """Corpus or model file could not be written/read."""


class NetworkFailure(SeqscanError):
    """Request failed after all retry attempts."""


class FeedUnparseable(SeqscanError):
    """Registry feed payload is not in the expected format."""


class NotFound(SeqscanError):
    """Archive no longer available (removed before fetch)."""
