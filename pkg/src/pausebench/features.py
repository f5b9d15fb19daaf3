"""Speech/pause timing features computed from an event sequence.

The eight features, in canonical order:

1. pause_duration — total of pauses between speech events (boundary
   pauses excluded), seconds;
2. total_duration — first speech onset to last speech offset, seconds;
3. speech_duration — total of all speech events, seconds;
4. pause_events — count of pauses between speech events;
5. pct_pause — pause_duration as a percentage of total_duration;
6. mean_phrase — mean duration of continuous-speech sections, seconds;
7. cv_phrase — coefficient of variation of phrase durations;
8. cv_pause — coefficient of variation of pause durations.

Coefficients of variation use the sample standard deviation (n-1) and are
None (missing, never zero) when fewer than two values exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonPositiveInput, NoSpeech
from .segmentation import EventKind, EventSequence, internal_pauses, phrases

FEATURE_NAMES = (
    "pause_duration",
    "total_duration",
    "speech_duration",
    "pause_events",
    "pct_pause",
    "mean_phrase",
    "cv_phrase",
    "cv_pause",
)

FEATURE_UNITS = {
    "pause_duration": "s",
    "total_duration": "s",
    "speech_duration": "s",
    "pause_events": "count",
    "pct_pause": "%",
    "mean_phrase": "s",
    "cv_phrase": "ratio",
    "cv_pause": "ratio",
}


@dataclass(frozen=True)
class FeatureVector:
    pause_duration: float
    total_duration: float
    speech_duration: float
    pause_events: int
    pct_pause: float
    mean_phrase: float
    cv_phrase: float | None
    cv_pause: float | None

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    def values(self) -> tuple:
        return tuple(getattr(self, name) for name in FEATURE_NAMES)


def _coefficient_of_variation(values: list[float]) -> float | None:
    n = len(values)
    if n < 2:
        return None
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return math.sqrt(var) / mean


def extract_features(seq: EventSequence) -> FeatureVector:
    """Compute the eight timing features for one recording.

    total_duration is anchored to speech onsets/offsets, so boundary
    pauses never contribute to any feature.
    """
    speech_events = [ev for ev in seq.events if ev.kind is EventKind.SPEECH]
    if not speech_events:
        raise NoSpeech("sequence has no speech events")

    total = speech_events[-1].end - speech_events[0].start
    phrase_durations = phrases(seq)
    pause_durations = internal_pauses(seq)

    speech_total = math.fsum(phrase_durations)
    pause_total = math.fsum(pause_durations)

    return FeatureVector(
        pause_duration=pause_total,
        total_duration=total,
        speech_duration=speech_total,
        pause_events=len(pause_durations),
        pct_pause=100.0 * pause_total / total,
        mean_phrase=speech_total / len(phrase_durations),
        cv_phrase=_coefficient_of_variation(phrase_durations),
        cv_pause=_coefficient_of_variation(pause_durations),
    )


def speaking_rate(word_count: int, total_duration: float) -> float:
    """Words per minute for a known word count over a reading duration.

    A convenience for synthetic pipelines; real severity stratification
    uses externally measured speaking rates from the manifest.
    """
    if word_count <= 0 or total_duration <= 0:
        raise NonPositiveInput(
            f"word_count and total_duration must be positive, got "
            f"{word_count} and {total_duration}"
        )
    return 60.0 * word_count / total_duration


def features_to_csv(vector: FeatureVector) -> str:
    """One header + one data row; missing CVs serialize as empty fields."""
    row = []
    for name in FEATURE_NAMES:
        value = getattr(vector, name)
        if value is None:
            row.append("")
        elif isinstance(value, int):
            row.append(str(value))
        else:
            row.append(repr(value))
    return ",".join(FEATURE_NAMES) + "\n" + ",".join(row) + "\n"
