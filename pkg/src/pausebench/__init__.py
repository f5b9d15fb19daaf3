"""Speech/pause timing features from forced alignment, plus the
concurrent-validity analysis (stratified Spearman correlations and
Bland-Altman agreement) between two feature sources."""

__version__ = "0.1.0"

from .alignment import (
    AlignmentTrack,
    Interval,
    Source,
    is_silence_label,
    parse_alignment_json,
    parse_spa_export,
    parse_textgrid,
    serialize_alignment_json,
    serialize_textgrid,
)
from .audio_io import (
    AudioBuffer,
    QualityLabel,
    classify_quality,
    decode_wav,
    encode_wav_pcm16,
    estimate_snr,
    frame_energies,
)
from .features import FEATURE_NAMES, FeatureVector, extract_features, speaking_rate
from .segmentation import (
    DEFAULT_PAUSE_THRESHOLD,
    Event,
    EventKind,
    EventSequence,
    events_to_csv,
    events_to_track,
    internal_pauses,
    phrases,
    segment,
)
from .stats import (
    BlandAltmanResult,
    CorrelationResult,
    SeverityLabel,
    bland_altman,
    classify_severity,
    spearman,
)
from .synth import (
    SynthProfile,
    brute_force_features,
    generate_corpus,
    generate_sequence,
    perturb_alignment,
    render_audio,
)

__all__ = [name for name in dir() if not name.startswith("_")]
