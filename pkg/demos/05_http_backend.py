"""Benchmarking a real embedding model over the wire protocol.

Usage:
    python demos/05_http_backend.py http://localhost:8316 ViT-B/32

The service must implement the documented protocol (the bundled
embed-service does):

    GET  /v1/health -> {"status": "ok", "models": [...]}
    POST /v1/embed  {"model": str, "images": [base64-PNG, ...]}
                    -> {"model": str, "dim": int, "embeddings": [[...], ...]}

Embeddings are cached content-addressed under ./demo_out/http-cache, so
re-running performs no backend traffic.
"""

import sys
from pathlib import Path

from channelscope import ChannelId, HttpProvider, RenderConfig
from channelscope.pipeline import RunConfig, run_pipeline

if len(sys.argv) < 2:
    print(__doc__)
    raise SystemExit(0)

url = sys.argv[1]
model = sys.argv[2] if len(sys.argv) > 2 else "ViT-B/32"

provider = HttpProvider(url, model)
health = provider.health()
print(f"service ok; models: {health['models']}")

base = Path(__file__).resolve().parent / "demo_out"
config = RunConfig(
    out=base / f"http-{model.replace('/', '_')}",
    backend=url,
    model=model,
    channels=tuple(ChannelId),
    steps=60,  # desk scale; the reference experiment uses 1000
    render=RenderConfig(canvas_px=336, stroke_px=4),
    cache=base / "http-cache",
)

report = run_pipeline(config)
print("\nlinearity per channel:")
for row in sorted(report.linearity, key=lambda r: -r["score"]):
    print(f"  {row['channel']:<10} {row['score']:.4f}")
print("\nkendall tau-b vs human ranking:", report.kendall_tau_vs_human)
print("report written under", config.out / "report")
