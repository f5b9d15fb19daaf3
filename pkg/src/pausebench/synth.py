"""Synthetic corpora with known ground truth for end-to-end verification.

Sequences are drawn from truncated normal distributions (phrases at least
50 ms, pauses at least 301 ms so every generated pause survives the
default 300 ms rule). Ground-truth features are computed here by a
deliberately naive scan of the raw event list, independent of the
features module, so the two can be checked against each other.

All randomness comes from numpy's PCG64 generator with explicit seeds;
identical profiles reproduce identical corpora.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, replace

import numpy as np

from .alignment import Interval, AlignmentTrack, Source, round_time
from .audio_io import AudioBuffer
from .errors import InvalidProfile, NoSpeech
from .features import FeatureVector
from .segmentation import (
    DEFAULT_PAUSE_THRESHOLD,
    Event,
    EventKind,
    EventSequence,
)

PHRASE_FLOOR_S = 0.05
PAUSE_FLOOR_S = 0.301

#: seed-mixing constants so one record's sub-streams are decorrelated
_PERTURB_SEED_SALT = 0xA5A5A5A5
_AUDIO_SEED_SALT = 0x5A5A5A5A


@dataclass(frozen=True)
class SynthProfile:
    """Parameters controlling one synthetic recording."""

    n_phrases: int
    phrase_mean: float
    phrase_sd: float
    pause_mean: float
    pause_sd: float
    boundary_pauses: bool = True
    jitter_sd: float = 0.0
    target_snr: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_phrases < 1:
            raise InvalidProfile("n_phrases must be at least 1")
        if self.phrase_mean <= 0 or self.pause_mean <= 0:
            raise InvalidProfile("distribution means must be positive")
        if self.phrase_sd < 0 or self.pause_sd < 0:
            raise InvalidProfile("distribution sds must be non-negative")
        if self.jitter_sd < 0:
            raise InvalidProfile("jitter_sd must be non-negative")
        if self.target_snr is not None and not math.isfinite(self.target_snr):
            raise InvalidProfile("target_snr must be finite")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _truncated_normal(rng, mean: float, sd: float, floor: float) -> float:
    if sd == 0.0:
        if mean < floor:
            raise InvalidProfile(
                f"mean {mean} below floor {floor} with zero sd cannot be sampled"
            )
        return mean
    for _ in range(10000):
        value = rng.normal(mean, sd)
        if value >= floor:
            return float(value)
    raise InvalidProfile(
        f"could not draw a value >= {floor} from N({mean}, {sd}^2)"
    )


def brute_force_features(seq: EventSequence) -> FeatureVector:
    """Ground-truth features by direct scan of the raw event list.

    Kept independent of the features module on purpose: internal pauses
    are found by temporal comparison against speech events (not by
    position), and statistics come from the stdlib statistics module.
    """
    triples = [(ev.kind is EventKind.SPEECH, ev.start, ev.end) for ev in seq.events]
    speech = [(s, e) for is_sp, s, e in triples if is_sp]
    if not speech:
        raise NoSpeech("no speech events")
    onset = min(s for s, _ in speech)
    offset = max(e for _, e in speech)
    phrase_durs = [e - s for s, e in speech]
    internal = [
        e - s
        for is_sp, s, e in triples
        if not is_sp
        and any(se <= s for _, se in speech)
        and any(ss >= e for ss, _ in speech)
    ]

    def cv(values):
        if len(values) < 2:
            return None
        return statistics.stdev(values) / statistics.fmean(values)

    total = offset - onset
    pause_total = math.fsum(internal)
    speech_total = math.fsum(phrase_durs)
    return FeatureVector(
        pause_duration=pause_total,
        total_duration=total,
        speech_duration=speech_total,
        pause_events=len(internal),
        pct_pause=100.0 * pause_total / total,
        mean_phrase=statistics.fmean(phrase_durs),
        cv_phrase=cv(phrase_durs),
        cv_pause=cv(internal),
    )


def generate_sequence(profile: SynthProfile) -> tuple[EventSequence, FeatureVector]:
    """Draw one event sequence plus its independently computed ground truth."""
    rng = _rng(profile.seed)
    events: list[Event] = []
    t = 0.0

    def advance(kind: EventKind, duration: float):
        nonlocal t
        start = t
        t = round_time(t + duration)
        events.append(Event(kind, start, t))

    if profile.boundary_pauses:
        advance(
            EventKind.PAUSE,
            _truncated_normal(rng, profile.pause_mean, profile.pause_sd, PAUSE_FLOOR_S),
        )
    for i in range(profile.n_phrases):
        if i > 0:
            advance(
                EventKind.PAUSE,
                _truncated_normal(rng, profile.pause_mean, profile.pause_sd, PAUSE_FLOOR_S),
            )
        advance(
            EventKind.SPEECH,
            _truncated_normal(rng, profile.phrase_mean, profile.phrase_sd, PHRASE_FLOOR_S),
        )
    if profile.boundary_pauses:
        advance(
            EventKind.PAUSE,
            _truncated_normal(rng, profile.pause_mean, profile.pause_sd, PAUSE_FLOOR_S),
        )

    seq = EventSequence(
        recording_id=f"synth-{profile.seed}",
        events=tuple(events),
        pause_threshold=DEFAULT_PAUSE_THRESHOLD,
    )
    return seq, brute_force_features(seq)


def perturb_alignment(
    seq: EventSequence, jitter_sd: float, seed: int
) -> AlignmentTrack:
    """Shift internal event boundaries by clamped normal noise.

    Models aligner timing error: each internal boundary moves by
    N(0, jitter_sd^2) seconds, truncated so every interval keeps at least
    one microsecond of length. Endpoints stay fixed; jitter_sd = 0 is the
    identity. Arithmetic happens on integer microseconds.
    """
    if jitter_sd < 0:
        raise InvalidProfile("jitter_sd must be non-negative")
    rng = _rng(seed)
    bounds_us = [int(round(seq.events[0].start * 1e6))]
    for ev in seq.events:
        bounds_us.append(int(round(ev.end * 1e6)))

    new_us = list(bounds_us)
    for k in range(1, len(bounds_us) - 1):
        shift = int(round(rng.normal(0.0, jitter_sd) * 1e6))
        lo = new_us[k - 1] + 1
        hi = bounds_us[k + 1] - 1
        new_us[k] = min(max(bounds_us[k] + shift, lo), hi)

    intervals = []
    for ev, lo, hi in zip(seq.events, new_us, new_us[1:]):
        label = "speech" if ev.kind is EventKind.SPEECH else ""
        intervals.append(Interval(lo / 1e6, hi / 1e6, label))
    return AlignmentTrack(
        recording_id=seq.recording_id,
        intervals=tuple(intervals),
        source=Source.Other,
        tier_name="words",
    )


def _normalize_power(x: np.ndarray, power: float) -> np.ndarray:
    mean_square = float(np.mean(np.square(x)))
    if mean_square == 0.0:
        raise InvalidProfile("cannot normalize a zero signal")
    return x * math.sqrt(power / mean_square)


def render_audio(
    seq: EventSequence,
    target_snr: float,
    sample_rate: int = 16000,
    seed: int = 0,
) -> AudioBuffer:
    """Render events as audio realizing the target SNR analytically.

    Speech events become noise-modulated tone complexes normalized to a
    fixed power; every non-speech sample is a noise floor normalized so
    the speech/noise power ratio equals target_snr exactly.
    """
    if not math.isfinite(target_snr):
        raise InvalidProfile("target_snr must be finite")
    if sample_rate < 8000:
        raise InvalidProfile("sample_rate must be at least 8000 Hz")
    speech_events = [ev for ev in seq.events if ev.kind is EventKind.SPEECH]
    if not speech_events:
        raise InvalidProfile("sequence has no speech to render")

    rng = _rng(seed)
    p_speech = 0.02
    p_noise = p_speech / (10.0 ** (target_snr / 10.0))
    n_total = int(round(seq.events[-1].end * sample_rate))
    out = np.zeros(n_total)
    is_speech_sample = np.zeros(n_total, dtype=bool)

    for ev in speech_events:
        lo = max(0, int(round(ev.start * sample_rate)))
        hi = min(n_total, int(round(ev.end * sample_rate)))
        if hi <= lo:
            continue
        n = hi - lo
        tt = np.arange(n) / sample_rate
        f0 = rng.uniform(110.0, 140.0)
        tone = np.zeros(n)
        for harmonic in range(1, 5):
            tone += np.sin(2.0 * math.pi * f0 * harmonic * tt + rng.uniform(0, 2 * math.pi))
        # slow amplitude modulation: ~20 Hz random control points, interpolated
        n_ctrl = max(2, n // max(1, sample_rate // 20) + 2)
        ctrl = rng.normal(size=n_ctrl)
        envelope = np.interp(
            np.linspace(0.0, n_ctrl - 1.0, n), np.arange(n_ctrl), ctrl
        )
        scale = float(np.std(envelope))
        if scale > 0:
            envelope = envelope / scale * 0.3
        modulated = tone * np.clip(1.0 + envelope, 0.1, None)
        out[lo:hi] = _normalize_power(modulated, p_speech)
        is_speech_sample[lo:hi] = True

    gap_indices = np.flatnonzero(~is_speech_sample)
    if gap_indices.size:
        # normalize each contiguous noise region separately so pause power
        # is exact no matter which subset an estimator integrates over
        breaks = np.flatnonzero(np.diff(gap_indices) > 1)
        for run in np.split(gap_indices, breaks + 1):
            noise = rng.normal(size=run.size)
            out[run[0] : run[-1] + 1] = _normalize_power(noise, p_noise)

    return AudioBuffer(samples=np.clip(out, -1.0, 1.0), sample_rate=sample_rate)


def derived_seed(base_seed: int, record_index: int) -> int:
    """Per-record seed: base seed XOR record index."""
    return base_seed ^ record_index


def perturb_seed(record_seed: int) -> int:
    return record_seed ^ _PERTURB_SEED_SALT


def audio_seed(record_seed: int) -> int:
    return record_seed ^ _AUDIO_SEED_SALT


DEFAULT_PROFILE = SynthProfile(
    n_phrases=8,
    phrase_mean=2.0,
    phrase_sd=0.5,
    pause_mean=0.8,
    pause_sd=0.3,
    boundary_pauses=True,
    jitter_sd=0.0,
    target_snr=None,
    seed=20240101,
)

#: quality ladder used when the profile leaves target_snr unset: cycling
#: these targets spreads recordings across Good / Fair / Poor
DEFAULT_SNR_LADDER = (25.0, 17.5, 10.0)

#: speaking rates cycled over ALS records: one per severity bucket
DEFAULT_WPM_LADDER = (180.0, 140.0, 100.0)


def load_profile(path) -> SynthProfile:
    """Read a SynthProfile from a JSON object of field overrides."""
    import json
    from dataclasses import fields

    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise InvalidProfile("profile file must hold a JSON object")
    known = {f.name for f in fields(SynthProfile)}
    unknown = set(obj) - known
    if unknown:
        raise InvalidProfile(f"unknown profile fields: {sorted(unknown)}")
    merged = {f.name: getattr(DEFAULT_PROFILE, f.name) for f in fields(SynthProfile)}
    merged.update(obj)
    return SynthProfile(**merged)


def generate_corpus(
    out_dir,
    n_recordings: int,
    profile: SynthProfile = DEFAULT_PROFILE,
    sample_rate: int = 16000,
):
    """Emit a ready-to-run corpus: WAVs, reference event CSVs, candidate
    JSON alignments (perturbed by profile.jitter_sd), and a manifest.

    Records alternate HC/ALS; ALS speaking rates cycle over the three
    severity buckets and, when the profile leaves target_snr unset,
    target SNRs cycle over the Good/Fair/Poor ladder. Returns the
    manifest path.
    """
    from pathlib import Path

    from .audio_io import encode_wav_pcm16
    from .segmentation import events_to_csv
    from .alignment import serialize_alignment_json

    if n_recordings < 1:
        raise InvalidProfile("n_recordings must be at least 1")
    out = Path(out_dir)
    for sub in ("wav", "ref", "test"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    rows = ["recording_id,speaker_id,group,wpm,wav_path,ref_alignment_path,test_alignment_path"]
    als_counter = 0
    for i in range(n_recordings):
        rid = f"rec{i:04d}"
        seed_i = derived_seed(profile.seed, i)
        target = (
            profile.target_snr
            if profile.target_snr is not None
            else DEFAULT_SNR_LADDER[i % len(DEFAULT_SNR_LADDER)]
        )
        record_profile = replace(profile, seed=seed_i, target_snr=target)
        seq, _truth = generate_sequence(record_profile)
        seq = EventSequence(
            recording_id=rid, events=seq.events, pause_threshold=seq.pause_threshold
        )

        ref_rel = f"ref/{rid}.csv"
        (out / ref_rel).write_text(events_to_csv(seq), encoding="utf-8")

        track = perturb_alignment(seq, profile.jitter_sd, perturb_seed(seed_i))
        test_rel = f"test/{rid}.json"
        (out / test_rel).write_text(serialize_alignment_json(track), encoding="utf-8")

        wav_rel = f"wav/{rid}.wav"
        buffer = render_audio(seq, target, sample_rate, audio_seed(seed_i))
        (out / wav_rel).write_bytes(encode_wav_pcm16(buffer))

        if i % 2 == 0:
            group, wpm = "HC", ""
        else:
            group = "ALS"
            wpm = f"{DEFAULT_WPM_LADDER[als_counter % len(DEFAULT_WPM_LADDER)]:g}"
            als_counter += 1
        rows.append(f"{rid},spk{i:04d},{group},{wpm},{wav_rel},{ref_rel},{test_rel}")

    manifest = out / "manifest.csv"
    manifest.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return manifest
