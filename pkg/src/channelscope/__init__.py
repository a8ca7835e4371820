"""channelscope: benchmark harness for visual-channel effectiveness of
image embedding models.

The library renders controlled single-channel stimuli (length, tilt,
area, color luminance, color saturation, curvature), collects embeddings
through pluggable backends, and scores each channel's accuracy
(embedding-trajectory linearity via PC1 explained variance) and
discriminability (peak structure in smoothed consecutive distances),
comparing the outcome against the human perceptual ranking.
"""

from ._version import __version__
from .channels import (
    HUMAN_CHANNEL_ORDER,
    ChannelId,
    Mark,
    RenderConfig,
    StimulusParams,
    channel_range,
    default_params,
    params_for,
)
from .embedding import (
    CacheKey,
    EmbeddingCache,
    EmbeddingVector,
    EmbedRequest,
    HttpProvider,
    MockProvider,
    CacheOnlyProvider,
    embed_batch,
    mock_provider,
    provider_from_descriptor,
)
from .errors import (
    BackendError,
    CacheError,
    ChannelscopeError,
    ConfigError,
    DegenerateSweepError,
    DomainError,
    ManifestError,
    RenderError,
    UnsupportedDesignError,
)
from .experiment import (
    FactorialPlan,
    Manifest,
    SweepPlan,
    load_manifest,
    materialize,
    plan_factorial,
    plan_single_sweep,
    stimulus_id,
)
from .metrics import (
    DEFAULT_PEAK_THRESHOLD_FRAC,
    DEFAULT_TIE_EPSILON,
    BoxStats,
    ChannelRanking,
    DistanceProfile,
    LinearityResult,
    PeakSet,
    auto_sigma,
    box_stats,
    consecutive_distances,
    detect_peaks,
    distance_profile,
    gaussian_kernel,
    human_ranking,
    kendall_tau_b,
    linearity,
    rank_channels,
    smooth,
)
from .pipeline import RunConfig, run_pipeline
from .png import decode_png, encode_png
from .render import RasterImage, render
from .report import RunReport, emit_figures, emit_tables

__all__ = [name for name in dir() if not name.startswith("_")]
