"""Sound-texture and MFCC features for audio clips, clustered into pseudo-labels."""

from ._core import *  # noqa: F401,F403
from ._core import (
    CLIP_SECONDS,
    TEXTURE_DIM,
    WORKING_RATE,
    CorruptionError,
    DataError,
    Error,
    FormatError,
    IoError,
    ParameterError,
    PipelineError,
)

__version__ = "0.1.0"
