"""Exception taxonomy shared across the toolkit.

Every error raised on a contract violation derives from CipherscopeError so
callers (and the CLI) can distinguish usage problems from genuine crashes.
"""


class CipherscopeError(Exception):
    """Base class for all toolkit errors."""


class EmptyInputError(CipherscopeError):
    """An operation that needs at least one observation received none."""


class SupportMismatchError(CipherscopeError):
    """KL divergence with zero smoothing where p has mass outside q's support."""


class SeriesTooShortError(CipherscopeError):
    """Trend statistics need a minimum series length."""


class AlphaOutOfRangeError(CipherscopeError):
    """Coverage fraction outside [0, 1]."""


class DegenerateFamilyError(CipherscopeError):
    """Family constant c^2 is zero; the detectability ceiling is identically 0."""


class EmptyCorpusError(CipherscopeError):
    """A corpus-level estimator received no files."""


class LengthMismatchError(CipherscopeError):
    """Encryption plan and plaintext disagree on file length."""


class NonceReuseError(CipherscopeError):
    """The same nonce was presented twice within one run."""


class MalformedImageError(CipherscopeError):
    """Graymap file does not match the 16x16/255 contract."""


class EmptyFileError(CipherscopeError):
    """Chunking requires at least one byte."""


class ChunkLenTooSmallError(CipherscopeError):
    """Chunk length below the 256-byte minimum."""


class ChunkTooSmallError(CipherscopeError):
    """A chunk passed to the classifier is below the 256-byte minimum."""


class MalformedVerdictFileError(CipherscopeError):
    """Verdict interchange file failed to parse or violated its schema."""


class IndexGapError(CipherscopeError):
    """Verdict indices are not a contiguous 0..K-1 run."""


class NoVerdictsError(CipherscopeError):
    """Aggregation received an empty verdict list."""


class EmptyFamilyError(CipherscopeError):
    """Threshold calibration received no validation records for a family."""


class UnknownFamilyError(CipherscopeError):
    """A scan referenced a family absent from the threshold table."""


class SpecInvalidError(CipherscopeError):
    """Synthetic corpus generator parameters are inconsistent."""


class SchemaMismatchError(CipherscopeError):
    """Manifest schema version missing or unsupported."""


class MalformedLineError(CipherscopeError):
    """A manifest line is not a valid record."""


class ManifestValidationError(CipherscopeError):
    """Manifest invariants (nonce/path uniqueness) violated."""
