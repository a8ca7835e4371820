"""Linearity as channel accuracy, demonstrated with the mock backends.

A sweep varies one channel over its range while the others sit at their
controlled values. The accuracy proxy is how much of the embedding
trajectory's variance the first principal component explains: 1.0 means
the model moves along a straight line as the stimulus magnitude grows.
"""

from channelscope import (
    ChannelId,
    EmbedRequest,
    RenderConfig,
    embed_batch,
    linearity,
    mock_provider,
    plan_single_sweep,
)

cfg = RenderConfig(canvas_px=128, stroke_px=4)
steps = 200


def sweep_requests(channel, provider_needs_pixels=False):
    plan = plan_single_sweep(channel, steps, cfg=cfg)
    # mocks read the attached stimulus record, so pixels can stay empty here
    return [EmbedRequest(image=b"", params=it.params, t=it.t) for it in plan.items]


# The "linear" mock embeds each stimulus as its channel magnitudes, so every
# sweep is perfectly collinear and scores 1.0 on all six channels.
linear = mock_provider("linear")
print(f"mock 'linear', {steps}-step sweeps:")
for channel in ChannelId:
    vectors = embed_batch(linear, sweep_requests(channel))
    result = linearity(vectors, channel=channel)
    print(f"  {channel.value:<10} -> linearity {result.score:.6f} (n={result.n}, dim={result.dim})")

# The "circle" mock wraps the sweep around a unit circle: PC1 can only ever
# explain half the variance, the classic non-linear trajectory.
circle = mock_provider("circle")
vectors = embed_batch(circle, sweep_requests(ChannelId.LENGTH))
print(f"\nmock 'circle' -> linearity {linearity(vectors).score:.4f} (limit 0.5 as steps grow)")

# A constant backend is a broken backend: zero variance is an error, never
# a silent score, because silent values would poison channel rankings.
constant = mock_provider("constant")
vectors = embed_batch(constant, sweep_requests(ChannelId.LENGTH))
try:
    linearity(vectors)
except Exception as exc:
    print(f"\nmock 'constant' -> {type(exc).__name__}: {exc}")
