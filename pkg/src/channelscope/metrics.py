"""Numeric core: trajectory linearity, distance profiles, peaks, rankings.

Linearity of an ordered embedding sweep is the fraction of total variance
captured by the first principal component; discriminability structure
comes from Gaussian-smoothed consecutive Euclidean distances and their
prominent peaks. All operations are pure and order-reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelId, HUMAN_CHANNEL_ORDER
from .embedding import EmbeddingVector, as_matrix
from .errors import DegenerateSweepError, DomainError

__all__ = [
    "LinearityResult",
    "DistanceProfile",
    "PeakSet",
    "ChannelRanking",
    "BoxStats",
    "DEFAULT_PEAK_THRESHOLD_FRAC",
    "DEFAULT_TIE_EPSILON",
    "linearity",
    "consecutive_distances",
    "auto_sigma",
    "gaussian_kernel",
    "smooth",
    "detect_peaks",
    "distance_profile",
    "rank_channels",
    "human_ranking",
    "kendall_tau_b",
    "box_stats",
]

#: Peak prominence cutoff as a fraction of the signal's range. The source
#: analysis concedes this knob is arbitrary, so it is an explicit, reported
#: parameter rather than a constant buried in the detector.
DEFAULT_PEAK_THRESHOLD_FRAC = 0.05

#: Two channels whose scores differ by no more than this are reported tied.
DEFAULT_TIE_EPSILON = 0.01

_ZERO_VARIANCE_EPS = 1e-12


def _to_matrix(embeddings) -> np.ndarray:
    if isinstance(embeddings, np.ndarray):
        mat = np.asarray(embeddings, dtype=np.float64)
        if mat.ndim != 2:
            raise DomainError(f"expected a 2-D embedding matrix, got shape {mat.shape}")
        return mat
    if len(embeddings) > 0 and isinstance(embeddings[0], EmbeddingVector):
        dims = {v.dim for v in embeddings}
        if len(dims) > 1:
            raise DomainError(f"embeddings have mixed dimensions: {sorted(dims)}")
        return as_matrix(embeddings)
    return np.asarray(embeddings, dtype=np.float64)


@dataclass(frozen=True)
class LinearityResult:
    """PC1 explained-variance ratio for one ordered sweep."""

    score: float
    n: int
    dim: int
    channel: ChannelId | None = None


@dataclass(frozen=True)
class PeakSet:
    """Strict local maxima surviving the prominence cutoff."""

    indices: tuple[int, ...]
    prominences: tuple[float, ...]
    threshold_frac: float

    @property
    def count(self) -> int:
        return len(self.indices)

    @property
    def group_count(self) -> int:
        """Peaks separate the sweep into this many regions (peaks + 1)."""
        return len(self.indices) + 1


@dataclass(frozen=True)
class DistanceProfile:
    """Raw and smoothed consecutive distances for one sweep, with peaks."""

    raw: np.ndarray
    sigma: float
    smoothed: np.ndarray
    peaks: PeakSet


def linearity(embeddings, channel: ChannelId | None = None) -> LinearityResult:
    """Fraction of total variance along the first principal component.

    Embeddings are centered; the score is the largest eigenvalue of the
    sample covariance over the eigenvalue sum (computed via the singular
    values of the centered matrix). Independent of input order and of any
    orthogonal transform, translation, or nonzero global scaling.

    Raises DegenerateSweepError when total variance is below 1e-12: a
    zero-variance sweep means a broken backend, and a silent 0 or 1 would
    poison channel rankings.
    """
    mat = _to_matrix(embeddings)
    n, dim = mat.shape
    if n < 3:
        raise DomainError(f"linearity needs at least 3 embeddings, got {n}")
    centered = mat - mat.mean(axis=0)
    svals = np.linalg.svd(centered, compute_uv=False)
    ev = svals**2 / (n - 1)
    total = float(ev.sum())
    if total < _ZERO_VARIANCE_EPS:
        raise DegenerateSweepError("degenerate sweep: zero variance")
    return LinearityResult(score=float(ev[0] / total), n=n, dim=dim, channel=channel)


def consecutive_distances(embeddings) -> np.ndarray:
    """Euclidean distance between each consecutive embedding pair."""
    mat = _to_matrix(embeddings)
    if mat.shape[0] < 2:
        raise DomainError(f"need at least 2 embeddings, got {mat.shape[0]}")
    return np.linalg.norm(np.diff(mat, axis=0), axis=1)


def auto_sigma(n: int) -> int:
    """Default smoothing width for an n-image sweep: sqrt(n) to the
    nearest integer (1000 -> 32, 400 -> 20, 2 -> 1)."""
    if n < 2:
        raise DomainError(f"sweep length must be >= 2, got {n}")
    r = math.isqrt(n)
    # nearest integer to sqrt(n), settled exactly in integer arithmetic
    return r + 1 if (n - r * r) > (r + 1) * (r + 1) - n else r


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized Gaussian weights truncated at radius floor(4*sigma + 0.5)."""
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    radius = int(4.0 * sigma + 0.5)
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(k**2) / (2.0 * sigma**2))
    return w / w.sum()


def smooth(signal, sigma: float) -> np.ndarray:
    """Gaussian smoothing under reflective boundary padding.

    The signal is extended by mirroring including the edge sample
    (..., c, b, a | a, b, c, ...), cycling for radii beyond the signal
    length, then convolved with ``gaussian_kernel(sigma)``. Output length
    equals input length and the signal mean is preserved.
    """
    x = np.asarray(signal, dtype=np.float64).reshape(-1)
    if x.size < 1:
        raise DomainError("cannot smooth an empty signal")
    kernel = gaussian_kernel(sigma)
    radius = (kernel.size - 1) // 2
    if radius == 0:
        return x.copy()
    padded = np.pad(x, radius, mode="symmetric")
    return np.convolve(padded, kernel, mode="valid")


def detect_peaks(signal, threshold_frac: float = DEFAULT_PEAK_THRESHOLD_FRAC) -> PeakSet:
    """Find strict local maxima and keep those with prominence at least
    ``threshold_frac`` of the signal's range.

    A plateau bounded by lower samples on both sides counts as one peak at
    its midpoint index. Prominence is the peak height above the higher of
    the two flanking minima, each taken between the peak and the nearest
    strictly higher sample (or the signal end). A constant signal has no
    peaks; that is an empty result, not an error.
    """
    x = np.asarray(signal, dtype=np.float64).reshape(-1)
    n = x.size
    if n < 3:
        raise DomainError(f"peak detection needs at least 3 samples, got {n}")
    if not 0.0 < threshold_frac < 1.0:
        raise DomainError(f"threshold_frac must be in (0, 1), got {threshold_frac}")

    candidates: list[int] = []
    i = 1
    while i < n - 1:
        if x[i] > x[i - 1]:
            j = i
            while j + 1 < n and x[j + 1] == x[i]:
                j += 1
            if j < n - 1 and x[j + 1] < x[i]:
                candidates.append((i + j) // 2)
            i = j + 1
        else:
            i += 1

    span = float(x.max() - x.min())
    cutoff = threshold_frac * span
    indices: list[int] = []
    proms: list[float] = []
    for p in candidates:
        height = x[p]
        left_min = height
        k = p - 1
        while k >= 0 and x[k] <= height:
            left_min = min(left_min, x[k])
            k -= 1
        right_min = height
        k = p + 1
        while k < n and x[k] <= height:
            right_min = min(right_min, x[k])
            k += 1
        prom = float(height - max(left_min, right_min))
        if prom >= cutoff and prom > 0.0:
            indices.append(p)
            proms.append(prom)
    return PeakSet(indices=tuple(indices), prominences=tuple(proms), threshold_frac=threshold_frac)


def distance_profile(
    embeddings,
    sigma: float | None = None,
    threshold_frac: float = DEFAULT_PEAK_THRESHOLD_FRAC,
) -> DistanceProfile:
    """Consecutive-distance profile of a sweep: raw distances, Gaussian
    smoothing (sigma defaults to sqrt of the sweep length), and peaks."""
    mat = _to_matrix(embeddings)
    raw = consecutive_distances(mat)
    sig = float(auto_sigma(mat.shape[0])) if sigma is None else float(sigma)
    smoothed = smooth(raw, sig)
    peaks = detect_peaks(smoothed, threshold_frac) if smoothed.size >= 3 else PeakSet((), (), threshold_frac)
    return DistanceProfile(raw=raw, sigma=sig, smoothed=smoothed, peaks=peaks)


@dataclass(frozen=True)
class ChannelRanking:
    """Channels ordered best-first, with adjacent near-equal scores tied."""

    channels: tuple[ChannelId, ...]
    scores: dict[ChannelId, float] | None
    tie_groups: tuple[tuple[ChannelId, ...], ...]
    tie_epsilon: float = 0.0

    @classmethod
    def from_order(cls, channels) -> "ChannelRanking":
        chans = tuple(channels)
        return cls(channels=chans, scores=None, tie_groups=tuple((c,) for c in chans))

    def ranks(self) -> dict[ChannelId, float]:
        """1-based ranks; members of a tie group share the group's mean rank."""
        out: dict[ChannelId, float] = {}
        pos = 1
        for group in self.tie_groups:
            mean_rank = pos + (len(group) - 1) / 2.0
            for c in group:
                out[c] = mean_rank
            pos += len(group)
        return out


def rank_channels(
    scores: dict[ChannelId, float], tie_epsilon: float = DEFAULT_TIE_EPSILON
) -> ChannelRanking:
    """Order channels by descending score; consecutive scores within
    ``tie_epsilon`` merge into one tie group (chained)."""
    if len(scores) < 2:
        raise DomainError("ranking needs at least 2 channels")
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0].value))
    groups: list[list[ChannelId]] = [[ordered[0][0]]]
    last_score = ordered[0][1]
    for chan, score in ordered[1:]:
        if abs(last_score - score) <= tie_epsilon:
            groups[-1].append(chan)
        else:
            groups.append([chan])
        last_score = score
    return ChannelRanking(
        channels=tuple(c for c, _ in ordered),
        scores=dict(ordered),
        tie_groups=tuple(tuple(g) for g in groups),
        tie_epsilon=tie_epsilon,
    )


def human_ranking(channels=None) -> ChannelRanking:
    """The human perceptual-accuracy baseline, optionally restricted to a
    channel subset (order preserved)."""
    if channels is None:
        order = HUMAN_CHANNEL_ORDER
    else:
        keep = set(channels)
        order = tuple(c for c in HUMAN_CHANNEL_ORDER if c in keep)
    return ChannelRanking.from_order(order)


def kendall_tau_b(r1: ChannelRanking, r2: ChannelRanking) -> float:
    """Kendall's tau-b between two rankings over the same channel set.

    All channel pairs are enumerated; ties contribute to the tie
    corrections. Returns NaN when one ranking is a single all-tied group
    (the correlation is undefined there).
    """
    ranks1, ranks2 = r1.ranks(), r2.ranks()
    if set(ranks1) != set(ranks2):
        raise DomainError("rankings cover different channel sets")
    chans = sorted(ranks1, key=lambda c: c.value)
    concordant = discordant = ties1 = ties2 = 0
    for i in range(len(chans)):
        for j in range(i + 1, len(chans)):
            d1 = ranks1[chans[i]] - ranks1[chans[j]]
            d2 = ranks2[chans[i]] - ranks2[chans[j]]
            if d1 == 0:
                ties1 += 1
            if d2 == 0:
                ties2 += 1
            if d1 * d2 > 0:
                concordant += 1
            elif d1 * d2 < 0:
                discordant += 1
    n0 = len(chans) * (len(chans) - 1) // 2
    denom = math.sqrt((n0 - ties1) * (n0 - ties2))
    if denom == 0.0:
        return float("nan")
    return (concordant - discordant) / denom


@dataclass(frozen=True)
class BoxStats:
    """Five-number summary; whiskers are the true min and max."""

    min: float
    q1: float
    median: float
    q3: float
    max: float


def box_stats(values) -> BoxStats:
    """Quartiles by linear interpolation between order statistics."""
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise DomainError("box_stats needs at least one value")
    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75], method="linear")
    return BoxStats(
        min=float(arr.min()), q1=float(q1), median=float(med), q3=float(q3), max=float(arr.max())
    )
