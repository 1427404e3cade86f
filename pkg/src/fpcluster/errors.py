"""Exception types shared across the library."""


class FpclusterError(Exception):
    """Base class for all fpcluster errors."""


class MissingFile(FpclusterError):
    """A referenced file does not exist."""


class DimensionMismatch(FpclusterError):
    """Images in a dataset differ in size, or a grid is too small."""


class MalformedManifest(FpclusterError):
    """Manifest CSV has a bad header or an unparseable row."""


class UnsupportedFormat(FpclusterError):
    """Image file is not an 8-bit P2/P5 PGM with maxval 255."""


class IoFailure(FpclusterError):
    """A file could not be created or written."""


class InvalidConfig(FpclusterError):
    """A configuration value violates its documented constraints."""


class InvalidArg(FpclusterError):
    """An argument lies outside its documented range."""


class ShapeMismatch(FpclusterError):
    """Array shapes are inconsistent with each other or with a model."""


class NumericalFailure(FpclusterError):
    """A numerical routine did not converge or produced non-finite values."""


class RankDeficient(FpclusterError):
    """More principal components requested than the data can support."""


class RankTooLow(FpclusterError):
    """Matrix has numerical rank below the requested subspace dimension."""


class DegenerateInput(FpclusterError):
    """Input is degenerate, e.g. an all-zero matrix."""


class TooLarge(FpclusterError):
    """Instance too large for exact (brute-force) evaluation."""


class DegenerateOptimum(FpclusterError):
    """Optimal objective is zero while the compared objective is not."""


class DegenerateAffinity(FpclusterError):
    """All pairwise distances are zero; no affinity bandwidth exists."""


class MissingPositiveClass(FpclusterError):
    """Sensitivity requested without a usable positive class."""


class UnknownId(FpclusterError):
    """Sample id not present in the dataset."""
