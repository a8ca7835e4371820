"""Integration tests against a live embedding service.

Deselected by default (``-m integration`` to run). Point
``CHANNELSCOPE_SERVICE_URL`` at a running service, e.g. the bundled
embed-service. The qualitative CLIP expectations additionally need real
model weights behind the service and take minutes on CPU.
"""

import os

import pytest

from channelscope.channels import ChannelId, RenderConfig
from channelscope.embedding import EmbedRequest, HttpProvider, embed_batch
from channelscope.experiment import plan_factorial, plan_single_sweep
from channelscope.metrics import box_stats, linearity
from channelscope.png import encode_png
from channelscope.render import render

SERVICE_URL = os.environ.get("CHANNELSCOPE_SERVICE_URL")
REFERENCE_MODELS = ("RN50x64", "ViT-B/32", "ViT-L/14@336px")

pytestmark = [
    pytest.mark.integration,
    pytest.mark.skipif(SERVICE_URL is None, reason="CHANNELSCOPE_SERVICE_URL not set"),
]


def _requests_for(plan):
    return [
        EmbedRequest(image=encode_png(render(it.params, plan.render_config)),
                     params=it.params, t=it.t)
        for it in plan.items
    ]


def test_health_lists_the_three_reference_models():
    provider = HttpProvider(SERVICE_URL, REFERENCE_MODELS[1])
    payload = provider.health()
    assert payload["status"] == "ok"
    assert set(REFERENCE_MODELS) <= set(payload["models"])


def test_repeated_requests_are_deterministic():
    provider = HttpProvider(SERVICE_URL, "ViT-B/32")
    cfg = RenderConfig(canvas_px=336, stroke_px=4)
    plan = plan_single_sweep(ChannelId.TILT, 3, cfg=cfg)
    reqs = _requests_for(plan)
    first = embed_batch(provider, reqs)
    second = embed_batch(provider, reqs)
    for a, b in zip(first, second):
        assert a.values.tobytes() == b.values.tobytes()


@pytest.mark.parametrize("model", REFERENCE_MODELS)
def test_batch_arity_and_constant_dim(model):
    provider = HttpProvider(SERVICE_URL, model)
    cfg = RenderConfig(canvas_px=336, stroke_px=4)
    plan = plan_single_sweep(ChannelId.LENGTH, 4, cfg=cfg)
    vectors = embed_batch(provider, _requests_for(plan))
    assert len(vectors) == 4
    assert len({v.dim for v in vectors}) == 1


@pytest.mark.slow
def test_luminance_ranks_lowest_linearity_with_vit_b32():
    """Qualitative reproduction; requires real CLIP weights behind the service."""
    provider = HttpProvider(SERVICE_URL, "ViT-B/32")
    cfg = RenderConfig(canvas_px=336, stroke_px=4)
    scores = {}
    for channel in ChannelId:
        plan = plan_single_sweep(channel, 200, cfg=cfg)
        vectors = embed_batch(provider, _requests_for(plan))
        scores[channel] = linearity(vectors).score
    assert min(scores, key=scores.get) is ChannelId.LUMINANCE, scores


@pytest.mark.slow
def test_factorial_median_puts_saturation_first_with_vit_b32():
    """Qualitative reproduction; requires real CLIP weights behind the service."""
    provider = HttpProvider(SERVICE_URL, "ViT-B/32")
    cfg = RenderConfig(canvas_px=336, stroke_px=4)
    medians = {}
    for channel in (c for c in ChannelId if c is not ChannelId.AREA):
        plan = plan_factorial(channel, 5, cfg)
        cell_scores = []
        for cell in plan.cells():
            vectors = embed_batch(provider, _requests_for(cell.sweep))
            cell_scores.append(linearity(vectors).score)
        medians[channel] = box_stats(cell_scores).median
    assert max(medians, key=medians.get) is ChannelId.SATURATION, medians
