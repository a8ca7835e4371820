import hashlib
from pathlib import Path

import numpy as np
import pytest

from channelscope.channels import RenderConfig


@pytest.fixture
def small_cfg() -> RenderConfig:
    """Fast render settings for tests; geometry semantics match the default."""
    return RenderConfig(canvas_px=64, stroke_px=4)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def tree_digest(root: Path) -> str:
    """Order-stable digest of a directory tree (paths + file bytes)."""
    h = hashlib.sha256()
    for p in sorted(Path(root).rglob("*")):
        if p.is_file():
            h.update(str(p.relative_to(root)).encode("utf-8"))
            h.update(b"\0")
            h.update(p.read_bytes())
    return h.hexdigest()
