"""Information ratio (IR) and mutual information ratio (MIR) image features."""

from .errors import (
    CorruptFile,
    DegenerateSize,
    DimensionMismatch,
    EmptyGrid,
    IndexOutOfRange,
    InvalidCoefficient,
    InvalidDistance,
    InvalidProbability,
    IoError,
    IRMIRError,
    MissingField,
    ParseError,
    UnsupportedFormat,
    ZeroMeanChannel,
)
from .ingest import Image, ManifestEntry, decode_image, encode_image, load_manifest
from .measures import (
    Channel,
    ChannelHistogram,
    JointHistogram,
    MatchReport,
    MeasureReport,
    bound_condition_holds,
    build_histogram,
    build_joint_histogram,
    entropy,
    information_ratio,
    ir_joint_upper_bound,
    joint_entropy,
    level_information_ratio,
    lir,
    lmir,
    match,
    measure,
    mutual_information,
    mutual_information_ratio,
)
from .optimizer import (
    OptimizeConfig,
    OptimizeResult,
    SweepCurve,
    optimize_k,
    sweep,
    two_symbol_profile,
)
from .transform import channel_mean, quantize, scale_brightness

__version__ = "0.1.0"
