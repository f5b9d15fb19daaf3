"""Parsers that normalize alignment files into one interval representation.

Three input formats are supported:

* Praat TextGrid (long or short text form, UTF-8 or UTF-16 with BOM);
* canonical JSON: ``{"recording_id": str, "source": str, "tier": str?,
  "intervals": [[start_s, end_s, label], ...]}`` (unknown extra keys such
  as adapter metadata are ignored);
* SPA-style event CSV with header ``event_type,start_s,end_s`` — this one
  yields an already-segmented event sequence, see parse_spa_export.

All times are rounded to microsecond precision on ingest so downstream
arithmetic is reproducible. Gaps between listed intervals are filled with
silence so every parsed track tiles its span exactly.
"""

from __future__ import annotations

import codecs
import csv
import enum
import io
import json
import math
from dataclasses import dataclass

from .errors import (
    EmptyTrack,
    NotATextGrid,
    OverlapDetected,
    PointTierOnly,
    SchemaViolation,
    TierNotFound,
)

#: labels (besides empty/whitespace) that conventionally mark silence
SILENCE_TOKENS = frozenset({"sil", "sp", "spn", "<p:>"})


def round_time(t: float) -> float:
    """Round a time in seconds to microsecond precision."""
    return round(t, 6)


def is_silence_label(label: str) -> bool:
    """True if the label denotes silence (empty or a known silence token)."""
    stripped = label.strip()
    return not stripped or stripped.lower() in SILENCE_TOKENS


class Source(enum.Enum):
    """Provenance of an alignment track."""

    Wav2Vec2 = "Wav2Vec2"
    MFA = "MFA"
    SPA = "SPA"
    Other = "Other"

    @classmethod
    def coerce(cls, name: str) -> "Source":
        for member in cls:
            if member.value.lower() == name.strip().lower():
                return member
        return cls.Other


@dataclass(frozen=True)
class Interval:
    start: float
    end: float
    label: str

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class AlignmentTrack:
    """Ordered, non-overlapping labeled intervals for one recording."""

    recording_id: str
    intervals: tuple[Interval, ...]
    source: Source = Source.Other
    tier_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        prev_end = None
        for i, iv in enumerate(self.intervals):
            if not (math.isfinite(iv.start) and math.isfinite(iv.end)):
                raise SchemaViolation("non-finite time", path=f"interval {i}")
            if iv.start < 0:
                raise SchemaViolation("negative time", path=f"interval {i}")
            if iv.end <= iv.start:
                raise SchemaViolation(
                    f"zero or negative length ({iv.start} .. {iv.end})",
                    path=f"interval {i}",
                )
            if prev_end is not None and iv.start < prev_end:
                raise OverlapDetected(
                    f"interval {i} starts at {iv.start} before previous end {prev_end}"
                )
            prev_end = iv.end

    @property
    def span(self) -> tuple[float, float]:
        if not self.intervals:
            raise EmptyTrack("track has no intervals")
        return self.intervals[0].start, self.intervals[-1].end


def _fill_gaps(intervals: list[Interval], span_min: float, span_max: float) -> list[Interval]:
    """Insert silence intervals so the list tiles [span_min, span_max]."""
    out: list[Interval] = []
    cursor = span_min
    for iv in intervals:
        if iv.start > cursor:
            out.append(Interval(cursor, iv.start, ""))
        out.append(iv)
        cursor = iv.end
    if span_max > cursor:
        out.append(Interval(cursor, span_max, ""))
    return out


# -- Praat TextGrid ----------------------------------------------------------

def _decode_praat_text(data: bytes) -> str:
    if data.startswith(codecs.BOM_UTF16_LE) or data.startswith(codecs.BOM_UTF16_BE):
        return data.decode("utf-16")
    if data.startswith(codecs.BOM_UTF8):
        return data.decode("utf-8-sig")
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise NotATextGrid(f"undecodable text: {exc}") from exc


def _praat_tokens(text: str):
    """Yield ('str', value) and ('word', value) tokens from Praat text.

    Quoted strings use doubled quotes as escapes and may span lines; all
    other whitespace-separated runs come back as bare words.
    """
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == '"':
            i += 1
            parts: list[str] = []
            while True:
                j = text.find('"', i)
                if j < 0:
                    raise NotATextGrid("unterminated string literal")
                if j + 1 < n and text[j + 1] == '"':
                    parts.append(text[i : j + 1])  # keep one literal quote
                    i = j + 2
                    continue
                parts.append(text[i:j])
                i = j + 1
                break
            yield "str", "".join(parts)
        else:
            j = i
            while j < n and not text[j].isspace():
                j += 1
            yield "word", text[i:j]
            i = j


class _ValueReader:
    """Sequential access to the meaningful values of a TextGrid body.

    Long-form decoration (``xmin =``, ``item [1]:`` ...) is dropped: only
    quoted strings, numeric words, and the <exists>/<absent> flags count.
    """

    def __init__(self, text: str):
        self._values: list[tuple[str, object]] = []
        for kind, value in _praat_tokens(text):
            if kind == "str":
                self._values.append(("str", value))
            elif value in ("<exists>", "<absent>"):
                self._values.append(("flag", value))
            else:
                try:
                    self._values.append(("num", float(value)))
                except ValueError:
                    continue  # long-form decoration
        self._pos = 0

    def _next(self, expected: str, what: str):
        if self._pos >= len(self._values):
            raise NotATextGrid(f"truncated file: expected {what}")
        kind, value = self._values[self._pos]
        if kind != expected:
            raise NotATextGrid(f"expected {what}, found {value!r}")
        self._pos += 1
        return value

    def number(self, what: str) -> float:
        return self._next("num", what)

    def integer(self, what: str) -> int:
        return int(self._next("num", what))

    def string(self, what: str) -> str:
        return self._next("str", what)

    def flag(self, what: str) -> str:
        return self._next("flag", what)


def parse_textgrid(
    data: bytes,
    tier: str | None = None,
    recording_id: str = "",
    source: Source = Source.Other,
) -> AlignmentTrack:
    """Parse a Praat TextGrid and return the named (or first) interval tier.

    Gaps between listed intervals are filled with silence so the track
    tiles the tier's [xmin, xmax] exactly. Zero-length intervals are
    dropped; overlapping times raise OverlapDetected.
    """
    text = _decode_praat_text(data)
    raw_lines = text.splitlines()
    nonempty = [i for i, ln in enumerate(raw_lines) if ln.strip()]
    if (
        len(nonempty) < 2
        or "ooTextFile" not in raw_lines[nonempty[0]]
        or "TextGrid" not in raw_lines[nonempty[1]]
    ):
        raise NotATextGrid("missing ooTextFile/TextGrid header")
    body = "\n".join(raw_lines[nonempty[1] + 1 :])

    reader = _ValueReader(body)
    reader.number("global xmin")
    reader.number("global xmax")
    if reader.flag("tiers flag") == "<absent>":
        raise PointTierOnly("TextGrid declares no tiers")
    n_tiers = reader.integer("tier count")

    chosen: tuple[str, float, float, list[Interval]] | None = None
    seen_interval_tiers: list[str] = []
    for _ in range(n_tiers):
        klass = reader.string("tier class")
        name = reader.string("tier name")
        t_min = reader.number("tier xmin")
        t_max = reader.number("tier xmax")
        count = reader.integer("tier size")
        if klass == "IntervalTier":
            items: list[Interval] = []
            for _ in range(count):
                lo = round_time(reader.number("interval xmin"))
                hi = round_time(reader.number("interval xmax"))
                label = reader.string("interval text")
                if hi > lo:
                    items.append(Interval(lo, hi, label))
            seen_interval_tiers.append(name)
            if chosen is None and (tier is None or name == tier):
                chosen = (name, round_time(t_min), round_time(t_max), items)
        else:
            for _ in range(count):  # point tier: (time, mark) pairs
                reader.number("point time")
                reader.string("point mark")

    if chosen is None:
        if tier is not None and seen_interval_tiers:
            raise TierNotFound(
                f"tier {tier!r} not found; interval tiers: {seen_interval_tiers}"
            )
        raise PointTierOnly("TextGrid has no interval tiers")

    name, t_min, t_max, items = chosen
    items.sort(key=lambda iv: (iv.start, iv.end))
    span_min = min(t_min, items[0].start) if items else t_min
    span_max = max(t_max, items[-1].end) if items else t_max
    filled = _fill_gaps(items, span_min, span_max)
    return AlignmentTrack(
        recording_id=recording_id,
        intervals=tuple(filled),
        source=source,
        tier_name=name,
    )


def _escape_praat(text: str) -> str:
    return text.replace('"', '""')


def serialize_textgrid(track: AlignmentTrack) -> str:
    """Render a track as a long-form TextGrid (times at microsecond precision)."""
    if not track.intervals:
        raise EmptyTrack("cannot serialize an empty track")
    lo, hi = track.span
    out = io.StringIO()
    out.write('File type = "ooTextFile"\n')
    out.write('Object class = "TextGrid"\n\n')
    out.write(f"xmin = {lo:.6f}\n")
    out.write(f"xmax = {hi:.6f}\n")
    out.write("tiers? <exists>\n")
    out.write("size = 1\n")
    out.write("item []:\n")
    out.write("    item [1]:\n")
    out.write('        class = "IntervalTier"\n')
    out.write(f'        name = "{_escape_praat(track.tier_name)}"\n')
    out.write(f"        xmin = {lo:.6f}\n")
    out.write(f"        xmax = {hi:.6f}\n")
    out.write(f"        intervals: size = {len(track.intervals)}\n")
    for i, iv in enumerate(track.intervals, start=1):
        out.write(f"        intervals [{i}]:\n")
        out.write(f"            xmin = {iv.start:.6f}\n")
        out.write(f"            xmax = {iv.end:.6f}\n")
        out.write(f'            text = "{_escape_praat(iv.label)}"\n')
    return out.getvalue()


# -- canonical JSON ----------------------------------------------------------

def parse_alignment_json(data: bytes) -> AlignmentTrack:
    """Parse the canonical JSON alignment format.

    Entries must be sorted and non-overlapping; internal gaps are filled
    with silence. SchemaViolation messages carry the offending path.
    """
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation(f"not valid UTF-8 JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaViolation("top level must be an object")

    recording_id = obj.get("recording_id")
    if not isinstance(recording_id, str) or not recording_id:
        raise SchemaViolation("must be a non-empty string", path="$.recording_id")
    source = obj.get("source")
    if not isinstance(source, str):
        raise SchemaViolation("must be a string", path="$.source")
    tier = obj.get("tier", "")
    if tier is None:
        tier = ""
    if not isinstance(tier, str):
        raise SchemaViolation("must be a string when present", path="$.tier")
    raw = obj.get("intervals")
    if not isinstance(raw, list) or not raw:
        raise SchemaViolation("must be a non-empty array", path="$.intervals")

    intervals: list[Interval] = []
    prev = None
    for i, entry in enumerate(raw):
        path = f"$.intervals[{i}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise SchemaViolation("must be [start, end, label]", path=path)
        start, end, label = entry
        if not isinstance(start, (int, float)) or not isinstance(end, (int, float)):
            raise SchemaViolation("start and end must be numbers", path=path)
        if not isinstance(label, str):
            raise SchemaViolation("label must be a string", path=path)
        start = round_time(float(start))
        end = round_time(float(end))
        if not (math.isfinite(start) and math.isfinite(end)):
            raise SchemaViolation("times must be finite", path=path)
        if start < 0:
            raise SchemaViolation("times must be non-negative", path=path)
        if end <= start:
            raise SchemaViolation("end must exceed start", path=path)
        if prev is not None:
            if start < prev.start:
                raise SchemaViolation("intervals out of order", path=path)
            if start < prev.end:
                raise OverlapDetected(
                    f"{path}: starts at {start} before previous end {prev.end}"
                )
        cur = Interval(start, end, label)
        intervals.append(cur)
        prev = cur

    filled = _fill_gaps(intervals, intervals[0].start, intervals[-1].end)
    return AlignmentTrack(
        recording_id=recording_id,
        intervals=tuple(filled),
        source=Source.coerce(source),
        tier_name=tier,
    )


def serialize_alignment_json(track: AlignmentTrack) -> str:
    """Render a track in the canonical JSON alignment format."""
    obj = {
        "recording_id": track.recording_id,
        "source": track.source.value,
        "tier": track.tier_name,
        "intervals": [[iv.start, iv.end, iv.label] for iv in track.intervals],
    }
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


# -- SPA-style event CSV -----------------------------------------------------

SPA_CSV_HEADER = ("event_type", "start_s", "end_s")


def parse_spa_export(data: bytes, recording_id: str = ""):
    """Parse an event CSV (header ``event_type,start_s,end_s``).

    Returns an EventSequence directly: rows are already thresholded
    speech/pause events, so only alternation and tiling are validated.
    The sequence's pause_threshold is None (the exporting tool's own).
    """
    from .segmentation import Event, EventKind, EventSequence

    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise SchemaViolation(f"not UTF-8: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise SchemaViolation("missing header row", path="row 1")
    header = tuple(cell.strip() for cell in rows[0])
    if header != SPA_CSV_HEADER:
        raise SchemaViolation(
            f"header must be {','.join(SPA_CSV_HEADER)!r}, got {','.join(header)!r}",
            path="row 1",
        )
    if len(rows) == 1:
        raise EmptyTrack("event CSV has a header but no data rows")

    events: list[Event] = []
    for lineno, row in enumerate(rows[1:], start=2):
        path = f"row {lineno}"
        if len(row) != 3:
            raise SchemaViolation("expected 3 columns", path=path)
        kind_text = row[0].strip().lower()
        if kind_text == "speech":
            kind = EventKind.SPEECH
        elif kind_text == "pause":
            kind = EventKind.PAUSE
        else:
            raise SchemaViolation(
                f"event_type must be speech or pause, got {row[0]!r}", path=path
            )
        try:
            start = round_time(float(row[1]))
            end = round_time(float(row[2]))
        except ValueError as exc:
            raise SchemaViolation(f"bad number: {exc}", path=path) from exc
        if not (math.isfinite(start) and math.isfinite(end)):
            raise SchemaViolation("times must be finite", path=path)
        if start < 0:
            raise SchemaViolation("times must be non-negative", path=path)
        if end <= start:
            raise SchemaViolation("end must exceed start", path=path)
        events.append(Event(kind, start, end))

    return EventSequence(
        recording_id=recording_id, events=tuple(events), pause_threshold=None
    )
