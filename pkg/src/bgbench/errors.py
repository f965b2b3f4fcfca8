"""Exception types raised across the package."""


class BgBenchError(Exception):
    """Base class for all domain errors."""


class DimensionMismatch(BgBenchError, ValueError):
    pass


class ChannelMismatch(BgBenchError, ValueError):
    pass


class PnmError(BgBenchError, ValueError):
    pass


class UnsupportedMagic(PnmError):
    pass


class TruncatedRaster(PnmError):
    pass


class MalformedHeader(PnmError):
    pass


class ManifestError(BgBenchError, ValueError):
    pass


class MissingKey(ManifestError):
    pass


class EmptyFrameList(ManifestError):
    pass


class ManifestParseError(ManifestError):
    pass


class InvalidLambda(BgBenchError, ValueError):
    pass


class GroundTruthError(BgBenchError, ValueError):
    pass


class DuplicateId(GroundTruthError):
    pass


class NegativeCount(GroundTruthError):
    pass


class MalformedRow(GroundTruthError):
    pass


class LengthMismatch(BgBenchError, ValueError):
    pass


class DegenerateSeries(BgBenchError, ValueError):
    pass


class InsufficientOverlap(BgBenchError, ValueError):
    pass


class InsufficientSequences(BgBenchError, ValueError):
    pass
