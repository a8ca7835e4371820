"""One full benchmark run against a mock backend, end to end.

Renders sweeps for all six channels, embeds them through the cache,
scores linearity and discriminability, ranks channels against the human
baseline, and emits tables plus SVG figures. Everything lands under
./demo_out/run and a second invocation reuses the cache (zero backend
calls) while reproducing identical bytes.
"""

from pathlib import Path

from channelscope import ChannelId, RenderConfig
from channelscope.pipeline import RunConfig, run_pipeline

base = Path(__file__).resolve().parent / "demo_out" / "run"

config = RunConfig(
    out=base / "out",
    backend="mock:linear",
    channels=tuple(ChannelId),
    steps=120,
    render=RenderConfig(canvas_px=128, stroke_px=4),
    cache=base / "cache",
    factorial=True,
    factorial_steps=3,
)

report = run_pipeline(config)

print("linearity per channel:")
for row in report.linearity:
    print(f"  {row['channel']:<10} {row['score']:.6f}")

print("\nfactorial box stats (3^4 cells per channel):")
for row in report.factorial:
    print(f"  {row['channel']:<10} median {row['median']:.4f}  range [{row['min']:.4f}, {row['max']:.4f}]")

print("\nranking:", " > ".join(" = ".join(g) for g in report.ranking["tie_groups"]))
print("human  :", " > ".join(report.human_baseline))
print("kendall tau-b vs human:", report.kendall_tau_vs_human)

print(f"\nartifacts under {config.out}:")
for path in sorted((config.out / "report").rglob("*")):
    if path.is_file():
        print("  report/" + str(path.relative_to(config.out / "report")))
