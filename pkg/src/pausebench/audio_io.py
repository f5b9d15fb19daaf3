"""WAV decoding, frame energies, SNR estimation, and audio quality labels.

Only RIFF/WAVE containers with 16-bit PCM or 32-bit IEEE-float samples are
supported; everything else is rejected explicitly. Quality labels follow the
15 dB / 20 dB SNR conventions (Poor below 15, Fair in [15, 20], Good above).
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyAudio,
    MalformedContainer,
    NonFiniteSnr,
    UnsupportedEncoding,
    ZeroNoiseFloor,
)

SNR_POOR_BELOW_DB = 15.0
SNR_GOOD_ABOVE_DB = 20.0

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3


class QualityLabel(enum.IntEnum):
    """Audio quality bucket, ordered Poor < Fair < Good."""

    Poor = 0
    Fair = 1
    Good = 2

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio with samples normalized to [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be a positive integer")
        if samples.ndim != 1:
            raise ValueError("AudioBuffer holds mono audio (1-D samples)")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if samples.size and (samples.min() < -1.0 or samples.max() > 1.0):
            raise ValueError("samples must lie in [-1, 1]")

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.samples.size / self.sample_rate

    def __len__(self) -> int:
        return self.samples.size


def _read_chunks(data: bytes):
    """Yield (chunk_id, payload) pairs from a RIFF body, checking sizes."""
    pos = 12
    while pos < len(data):
        if pos + 8 > len(data):
            raise MalformedContainer(f"truncated chunk header at byte {pos}")
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        start = pos + 8
        if start + size > len(data):
            raise MalformedContainer(
                f"chunk {cid!r} declares {size} bytes but only "
                f"{len(data) - start} remain"
            )
        yield cid, data[start : start + size]
        pos = start + size + (size & 1)  # chunks are word-aligned


def decode_wav(data: bytes) -> AudioBuffer:
    """Decode a RIFF/WAVE byte string into a normalized mono AudioBuffer.

    Multichannel input is averaged to mono. 16-bit PCM samples are scaled
    by 1/32768; float samples are clipped to [-1, 1].

    Raises MalformedContainer for structural problems and
    UnsupportedEncoding for any codec other than PCM16 / float32.
    """
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedContainer("not a RIFF/WAVE container")

    fmt = None
    payload = None
    for cid, body in _read_chunks(data):
        if cid == b"fmt " and fmt is None:
            if len(body) < 16:
                raise MalformedContainer("fmt chunk shorter than 16 bytes")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data" and payload is None:
            payload = body
    if fmt is None:
        raise MalformedContainer("missing fmt chunk")
    if payload is None:
        raise MalformedContainer("missing data chunk")

    audio_format, n_channels, sample_rate, _, block_align, bits = fmt
    if n_channels < 1:
        raise MalformedContainer("fmt declares zero channels")
    if sample_rate < 1:
        raise MalformedContainer("fmt declares non-positive sample rate")

    if audio_format == _WAVE_FORMAT_PCM and bits == 16:
        dtype = np.dtype("<i2")
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype = np.dtype("<f4")
    else:
        raise UnsupportedEncoding(
            f"format tag {audio_format} at {bits} bits is not supported "
            "(PCM 16-bit or IEEE float 32-bit only)"
        )

    frame_bytes = n_channels * dtype.itemsize
    if block_align and block_align != frame_bytes:
        raise MalformedContainer(
            f"block align {block_align} inconsistent with "
            f"{n_channels} channel(s) at {bits} bits"
        )
    if len(payload) % frame_bytes:
        raise MalformedContainer(
            f"data chunk size {len(payload)} is not a multiple of the "
            f"{frame_bytes}-byte frame size"
        )

    raw = np.frombuffer(payload, dtype=dtype)
    if n_channels > 1:
        raw = raw.reshape(-1, n_channels)
    samples = raw.astype(np.float64)
    if n_channels > 1:
        samples = samples.mean(axis=1)
    if dtype.kind == "i":
        samples /= 32768.0
    else:
        if samples.size and not np.all(np.isfinite(samples)):
            raise MalformedContainer("float data contains non-finite samples")
        np.clip(samples, -1.0, 1.0, out=samples)
    return AudioBuffer(samples=samples, sample_rate=int(sample_rate))


def encode_wav_pcm16(audio: AudioBuffer) -> bytes:
    """Serialize a buffer as mono 16-bit PCM RIFF/WAVE bytes.

    Decoding the result reproduces 16-bit-sourced samples bit-exactly.
    """
    scaled = np.rint(audio.samples * 32768.0)
    ints = np.clip(scaled, -32768, 32767).astype("<i2")
    payload = ints.tobytes()
    byte_rate = audio.sample_rate * 2
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(payload)),
            b"WAVE",
            b"fmt ",
            struct.pack("<IHHIIHH", 16, _WAVE_FORMAT_PCM, 1, audio.sample_rate, byte_rate, 2, 16),
            b"data",
            struct.pack("<I", len(payload)),
        ]
    )
    return header + payload


def frame_energies(audio: AudioBuffer, frame_ms: float = 25.0, hop_ms: float = 10.0) -> np.ndarray:
    """Short-time RMS values, one per hop; the final partial frame is dropped.

    Output length is floor((N - frame) / hop) + 1 for N >= frame samples.
    """
    if len(audio) == 0:
        raise EmptyAudio("cannot frame empty audio")
    frame = int(round(frame_ms * audio.sample_rate / 1000.0))
    hop = int(round(hop_ms * audio.sample_rate / 1000.0))
    if frame < 1 or hop < 1:
        raise ValueError("frame and hop must each cover at least one sample")
    if len(audio) < frame:
        return np.empty(0, dtype=np.float64)
    windows = np.lib.stride_tricks.sliding_window_view(audio.samples, frame)[::hop]
    return np.sqrt(np.mean(np.square(windows), axis=1))


def _event_sample_slices(events, kind, sample_rate: int, n_samples: int):
    slices = []
    for ev in events:
        if ev.kind is not kind:
            continue
        lo = int(round(ev.start * sample_rate))
        hi = int(round(ev.end * sample_rate))
        lo = max(0, min(lo, n_samples))
        hi = max(0, min(hi, n_samples))
        if hi > lo:
            slices.append((lo, hi))
    return slices


def _mean_power(samples: np.ndarray, slices) -> float:
    total = 0.0
    count = 0
    for lo, hi in slices:
        seg = samples[lo:hi]
        total += float(np.dot(seg, seg))
        count += hi - lo
    return total / count if count else math.nan


def estimate_snr(audio: AudioBuffer, alignment=None) -> float:
    """Estimate SNR in dB as 10*log10(P_signal / P_noise).

    With an event sequence, signal power is the mean square over speech
    events and noise power the mean square over pause events. Without one
    (or when the sequence lacks speech or pause samples) a percentile
    fallback is used: noise = mean power of the lowest-decile RMS frames,
    signal = mean power of the top half.

    Raises ZeroNoiseFloor when the noise region is digital silence.
    """
    if len(audio) == 0:
        raise EmptyAudio("cannot estimate SNR of empty audio")

    if alignment is not None:
        span_end = alignment.events[-1].end
        if span_end > audio.duration + 0.5 / audio.sample_rate:
            raise ValueError(
                f"alignment span ends at {span_end:.6f}s but audio lasts "
                f"{audio.duration:.6f}s"
            )
        from .segmentation import EventKind  # local import avoids a cycle

        speech = _event_sample_slices(alignment.events, EventKind.SPEECH, audio.sample_rate, len(audio))
        noise = _event_sample_slices(alignment.events, EventKind.PAUSE, audio.sample_rate, len(audio))
        if speech and noise:
            p_signal = _mean_power(audio.samples, speech)
            p_noise = _mean_power(audio.samples, noise)
            if p_noise == 0.0:
                raise ZeroNoiseFloor(
                    "pause regions are digital silence", signal_power=p_signal
                )
            return 10.0 * math.log10(p_signal / p_noise)
        # degenerate sequence (no speech or no pause samples): fall through

    rms = frame_energies(audio)
    if rms.size == 0:
        raise EmptyAudio("audio shorter than one analysis frame")
    powers = np.sort(np.square(rms))
    n = powers.size
    p_noise = float(np.mean(powers[: max(1, n // 10)]))
    p_signal = float(np.mean(powers[n // 2 :]))
    if p_noise == 0.0:
        raise ZeroNoiseFloor("noise floor is digital silence", signal_power=p_signal)
    return 10.0 * math.log10(p_signal / p_noise)


def classify_quality(snr_db: float) -> QualityLabel:
    """Map an SNR value to Poor (<15), Fair ([15, 20]) or Good (>20)."""
    if not math.isfinite(snr_db):
        raise NonFiniteSnr(f"SNR must be finite, got {snr_db!r}")
    if snr_db < SNR_POOR_BELOW_DB:
        return QualityLabel.Poor
    if snr_db > SNR_GOOD_ABOVE_DB:
        return QualityLabel.Good
    return QualityLabel.Fair
