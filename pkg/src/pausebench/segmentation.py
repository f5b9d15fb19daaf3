"""Speech/pause event segmentation of alignment tracks.

A silence run becomes a Pause event when it lasts at least the pause
threshold (default 300 ms); shorter silences are absorbed into the
surrounding speech. Duration comparisons happen on integer microseconds so
exactly-at-threshold silences are classified deterministically.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

from .alignment import AlignmentTrack, SPA_CSV_HEADER, is_silence_label
from .errors import EmptyTrack, NonAlternatingEvents, SchemaViolation

DEFAULT_PAUSE_THRESHOLD = 0.300


def _usec(seconds: float) -> int:
    return int(round(seconds * 1e6))


class EventKind(enum.Enum):
    SPEECH = "speech"
    PAUSE = "pause"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    start: float
    end: float

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class EventSequence:
    """Alternating speech/pause events tiling one contiguous span.

    pause_threshold records the rule used to build the sequence; it is
    None for imported event files whose thresholding happened elsewhere.
    """

    recording_id: str
    events: tuple[Event, ...]
    pause_threshold: float | None

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if not self.events:
            raise EmptyTrack("event sequence has no events")
        prev = None
        for i, ev in enumerate(self.events):
            if not (math.isfinite(ev.start) and math.isfinite(ev.end)):
                raise SchemaViolation("non-finite time", path=f"event {i}")
            if ev.end <= ev.start:
                raise SchemaViolation("zero or negative length", path=f"event {i}")
            if prev is not None:
                if ev.kind is prev.kind:
                    raise NonAlternatingEvents(
                        f"consecutive {ev.kind.value} events at index {i}"
                    )
                if ev.start != prev.end:
                    raise SchemaViolation(
                        f"gap or overlap: previous end {prev.end}, next start {ev.start}",
                        path=f"event {i}",
                    )
            prev = ev
        has_speech = any(ev.kind is EventKind.SPEECH for ev in self.events)
        if self.pause_threshold is not None and has_speech:
            min_us = _usec(self.pause_threshold)
            for i, ev in enumerate(self.events):
                if ev.kind is EventKind.PAUSE and _usec(ev.duration) < min_us:
                    raise SchemaViolation(
                        f"pause of {ev.duration:.6f}s is below the "
                        f"{self.pause_threshold:.3f}s threshold",
                        path=f"event {i}",
                    )

    @property
    def span(self) -> tuple[float, float]:
        return self.events[0].start, self.events[-1].end


def segment(
    track: AlignmentTrack,
    pause_threshold: float = DEFAULT_PAUSE_THRESHOLD,
    min_speech: float = 0.0,
) -> EventSequence:
    """Convert an alignment track into alternating speech/pause events.

    Silence runs of at least pause_threshold become Pause events (a run
    exactly at the threshold counts as a pause); shorter runs merge into
    the adjacent speech. An all-silence track yields a single Pause event
    regardless of threshold. With min_speech > 0, speech events shorter
    than min_speech are merged into their longer neighboring pause
    (preceding pause on ties), left to right.
    """
    if not track.intervals:
        raise EmptyTrack("cannot segment an empty track")
    if pause_threshold < 0 or min_speech < 0:
        raise ValueError("thresholds must be non-negative")

    # coalesce intervals into alternating silence/speech runs
    runs: list[list] = []  # [is_silence, start, end]
    for iv in track.intervals:
        silent = is_silence_label(iv.label)
        if runs and runs[-1][0] == silent:
            runs[-1][2] = iv.end
        else:
            runs.append([silent, iv.start, iv.end])

    if all(r[0] for r in runs):
        events = (Event(EventKind.PAUSE, runs[0][1], runs[-1][2]),)
        return EventSequence(track.recording_id, events, pause_threshold)

    thr_us = _usec(pause_threshold)
    events_raw: list[Event] = []
    open_start: float | None = None  # start of the speech event being built

    def flush_speech(end: float):
        nonlocal open_start
        if open_start is not None:
            events_raw.append(Event(EventKind.SPEECH, open_start, end))
            open_start = None

    for silent, start, end in runs:
        if not silent:
            if open_start is None:
                open_start = start
            continue
        keep_pause = _usec(end - start) >= thr_us
        if keep_pause:
            flush_speech(start)
            events_raw.append(Event(EventKind.PAUSE, start, end))
        elif open_start is None:
            open_start = start  # sub-threshold leading silence joins next speech
        # sub-threshold silence between/after speech: stay open, absorb
    flush_speech(runs[-1][2])

    if min_speech > 0:
        events_raw = _suppress_short_speech(events_raw, min_speech)

    return EventSequence(track.recording_id, tuple(events_raw), pause_threshold)


def _suppress_short_speech(events: list[Event], min_speech: float) -> list[Event]:
    """Merge speech events shorter than min_speech into a neighboring pause."""
    min_us = _usec(min_speech)
    out = list(events)
    while True:
        idx = next(
            (
                i
                for i, ev in enumerate(out)
                if ev.kind is EventKind.SPEECH and _usec(ev.duration) < min_us
            ),
            None,
        )
        if idx is None:
            return out
        before = out[idx - 1] if idx > 0 else None
        after = out[idx + 1] if idx + 1 < len(out) else None
        if before is None and after is None:
            return out  # lone speech event: nothing to merge into
        # pick the longer pause neighbor; ties go to the preceding pause
        if after is None or (before is not None and before.duration >= after.duration):
            out[idx - 1 : idx + 1] = [Event(EventKind.PAUSE, before.start, out[idx].end)]
            idx -= 1
        else:
            out[idx : idx + 2] = [Event(EventKind.PAUSE, out[idx].start, after.end)]
        # coalesce any pause-pause adjacency created by the merge
        if idx > 0 and out[idx - 1].kind is EventKind.PAUSE:
            out[idx - 1 : idx + 1] = [
                Event(EventKind.PAUSE, out[idx - 1].start, out[idx].end)
            ]
            idx -= 1
        if idx + 1 < len(out) and out[idx + 1].kind is EventKind.PAUSE:
            out[idx : idx + 2] = [Event(EventKind.PAUSE, out[idx].start, out[idx + 1].end)]


def phrases(seq: EventSequence) -> list[float]:
    """Durations of the speech events (maximal runs of continuous speech)."""
    return [ev.duration for ev in seq.events if ev.kind is EventKind.SPEECH]


def internal_pauses(seq: EventSequence) -> list[float]:
    """Durations of pauses strictly between two speech events.

    Because events alternate, a pause is internal exactly when it is
    neither the first nor the last event.
    """
    last = len(seq.events) - 1
    return [
        ev.duration
        for i, ev in enumerate(seq.events)
        if ev.kind is EventKind.PAUSE and 0 < i < last
    ]


def events_to_track(seq: EventSequence, speech_label: str = "speech") -> AlignmentTrack:
    """Re-express events as an alignment track (pauses become silence)."""
    intervals = tuple(
        _event_interval(ev, speech_label) for ev in seq.events
    )
    return AlignmentTrack(
        recording_id=seq.recording_id, intervals=intervals, tier_name="events"
    )


def _event_interval(ev: Event, speech_label: str):
    from .alignment import Interval

    label = speech_label if ev.kind is EventKind.SPEECH else ""
    return Interval(ev.start, ev.end, label)


def events_to_csv(seq: EventSequence) -> str:
    """Serialize events in the SPA-compatible CSV schema."""
    out = io.StringIO()
    out.write(",".join(SPA_CSV_HEADER) + "\n")
    for ev in seq.events:
        out.write(f"{ev.kind.value},{ev.start:.6f},{ev.end:.6f}\n")
    return out.getvalue()
