"""Exception types raised across the toolkit.

Every error that crosses a module boundary derives from PausebenchError so
callers (and the CLI) can distinguish domain failures from programming bugs.
"""


class PausebenchError(Exception):
    """Base class for all toolkit errors."""


# audio decoding / SNR

class MalformedContainer(PausebenchError):
    """RIFF/WAVE container is structurally broken (bad magic, chunk sizes)."""


class UnsupportedEncoding(PausebenchError):
    """Audio codec other than 16-bit PCM or 32-bit IEEE float."""


class EmptyAudio(PausebenchError):
    """Operation needs at least one sample (or one analysis frame)."""


class ZeroNoiseFloor(PausebenchError):
    """Noise region is digital silence; SNR would be infinite.

    Carries the measured signal power so callers can still report quality
    (treated as Good, with a warning) instead of propagating infinity.
    """

    def __init__(self, message: str, signal_power: float = 0.0):
        super().__init__(message)
        self.signal_power = signal_power


class NonFiniteSnr(PausebenchError):
    """Quality classification requires a finite SNR value."""


# alignment ingest

class NotATextGrid(PausebenchError):
    """Content is not a parseable Praat ooTextFile TextGrid."""


class TierNotFound(PausebenchError):
    """Requested tier name is absent from the TextGrid."""


class PointTierOnly(PausebenchError):
    """TextGrid contains no interval tiers."""


class OverlapDetected(PausebenchError):
    """Interval times overlap; the track cannot be ordered."""


class SchemaViolation(PausebenchError):
    """Input violates the canonical alignment/event schema.

    ``path`` locates the offending field (JSON-pointer-ish, e.g.
    ``$.intervals[3]`` or ``row 7``).
    """

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class NonAlternatingEvents(PausebenchError):
    """Event sequence does not strictly alternate speech/pause."""


class EmptyTrack(PausebenchError):
    """Alignment track or event list contains no usable intervals."""


# features

class NoSpeech(PausebenchError):
    """Feature extraction needs at least one speech event."""


class NonPositiveInput(PausebenchError):
    """Rate computation needs strictly positive inputs."""


# statistics

class TooFewPairs(PausebenchError):
    """Not enough complete pairs after dropping missing values."""

    def __init__(self, message: str, n: int = 0):
        super().__init__(message)
        self.n = n


class ConstantSeries(PausebenchError):
    """A series has fewer than two distinct values; ranks are degenerate."""


class MissingWpm(PausebenchError):
    """ALS severity classification requires a speaking rate."""


# batch report pipeline

class EmptyManifest(PausebenchError):
    """Manifest contains no data rows."""


class AllRecordsExcluded(PausebenchError):
    """Every manifest record failed processing; nothing to analyze.

    ``exclusions`` holds (recording_id, reason, detail) triples for the log.
    """

    def __init__(self, message: str, exclusions=()):
        super().__init__(message)
        self.exclusions = list(exclusions)


class UnwritableOutput(PausebenchError):
    """Report output directory or file cannot be written."""


# synthetic corpus generation

class InvalidProfile(PausebenchError):
    """Synthesis profile fails validation."""
