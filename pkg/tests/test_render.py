import math

import numpy as np
import pytest

from channelscope.channels import ChannelId, Mark, RenderConfig, StimulusParams, default_params, params_for
from channelscope.errors import RenderError
from channelscope.render import render


def ink_mask(img) -> np.ndarray:
    return (img.pixels != 255).any(axis=2)


def ink_mass(img) -> float:
    """Total coverage in pixel units, recovered from the green channel
    (the background is white and hue-0 marks satisfy g == b < 255)."""
    g = img.pixels[:, :, 1].astype(np.float64)
    fg_g = g[ink_mask(img)].min() if ink_mask(img).any() else 0.0
    if fg_g == 255.0:
        return 0.0
    return float(((255.0 - g) / (255.0 - fg_g)).sum())


class TestDeterminism:
    def test_identical_params_identical_buffers(self, small_cfg):
        a = render(default_params(), small_cfg)
        b = render(default_params(), small_cfg)
        assert a.pixels.tobytes() == b.pixels.tobytes()

    def test_shape_and_dtype(self, small_cfg):
        img = render(default_params(), small_cfg)
        assert img.pixels.shape == (64, 64, 3)
        assert img.pixels.dtype == np.uint8
        assert len(img.tobytes()) == 3 * 64 * 64


class TestColor:
    def test_background_is_white(self, small_cfg):
        img = render(default_params(), small_cfg)
        corner = img.pixels[0, 0]
        assert corner.tolist() == [255, 255, 255]

    def test_defaults_draw_pure_red(self, small_cfg):
        img = render(default_params(), small_cfg)
        core = img.pixels[img.pixels[:, :, 1] == 0]
        assert len(core) > 0
        assert (core[:, 0] == 255).all() and (core[:, 2] == 0).all()

    def test_zero_luminance_is_black(self, small_cfg):
        p = params_for(ChannelId.LUMINANCE, 0.0, default_params())
        img = render(p, small_cfg)
        px = img.pixels.astype(int)
        # fully-covered pixels are pure black; AA edge pixels blend to gray
        assert (px.min(axis=(0, 1)) == [0, 0, 0]).all()
        assert (px[:, :, 0] == px[:, :, 1]).all() and (px[:, :, 1] == px[:, :, 2]).all()

    def test_hue_invariance_across_luminance_and_saturation(self, small_cfg):
        for channel in (ChannelId.LUMINANCE, ChannelId.SATURATION):
            for t in (0.0, 0.3, 0.62, 1.0):
                img = render(params_for(channel, t, default_params()), small_cfg)
                px = img.pixels.astype(int)
                assert (np.abs(px[:, :, 1] - px[:, :, 2]) <= 1).all()
                assert (px[:, :, 0] >= px[:, :, 1] - 1).all()


class TestLineGeometry:
    def test_zero_length_renders_stroke_width_dot(self, small_cfg):
        p = params_for(ChannelId.LENGTH, 0.0, default_params())
        img = render(p, small_cfg)
        mask = ink_mask(img)
        assert mask.any()
        rows, cols = np.where(mask)
        extent = max(rows.max() - rows.min(), cols.max() - cols.min()) + 1
        assert extent <= small_cfg.stroke_px + 2  # stroke plus the AA ring

    def test_monotone_ink_in_length(self, small_cfg):
        masses = [
            ink_mass(render(params_for(ChannelId.LENGTH, t, default_params()), small_cfg))
            for t in np.linspace(0, 1, 11)
        ]
        assert all(b >= a - 1e-9 for a, b in zip(masses, masses[1:]))

    def test_monotone_ink_in_area(self, small_cfg):
        masses = [
            ink_mass(render(params_for(ChannelId.AREA, t, default_params()), small_cfg))
            for t in np.linspace(0, 1, 11)
        ]
        assert all(b >= a - 1e-9 for a, b in zip(masses, masses[1:]))

    def test_rotation_containment(self, small_cfg):
        # a centered full-length segment renders without error at any tilt
        for tilt_t in np.linspace(0, 1, 13):
            p = params_for(ChannelId.TILT, float(tilt_t), default_params())
            p = params_for(ChannelId.LENGTH, 1.0, p)
            img = render(p, small_cfg)
            assert ink_mask(img).any()

    def test_tilt_rotates_counterclockwise(self, small_cfg):
        p = params_for(ChannelId.TILT, 0.5, default_params())  # 45 degrees
        img = render(p, small_cfg)
        rows, cols = np.where(ink_mask(img))
        # in math coords the mark runs along y = x: row decreases as col grows
        corr = np.corrcoef(cols, rows)[0, 1]
        assert corr < -0.9

    def test_semicircle_chord_matches_arc_math(self):
        cfg = RenderConfig(canvas_px=336, stroke_px=4)
        p = params_for(ChannelId.CURVATURE, 1.0, default_params())
        img = render(p, cfg)
        rows, cols = np.where(ink_mask(img))
        arc_len = 0.5 * cfg.canvas_px
        chord = 2.0 * arc_len / math.pi  # 2 r sin(phi/2), r = L/phi, phi = pi
        measured = cols.max() - cols.min() + 1
        assert measured == pytest.approx(chord + cfg.stroke_px, abs=1.5)
        # arc bulges to one side: all ink on or above the chord line
        y_math = cfg.canvas_px - (rows + 0.5)
        assert (y_math >= cfg.canvas_px / 2 - cfg.stroke_px).all()
        # apex sits one radius above the center
        assert y_math.max() - cfg.canvas_px / 2 == pytest.approx(
            arc_len / math.pi + cfg.stroke_px / 2, abs=1.5
        )

    def test_curvature_continuity_to_straight_segment(self, small_cfg):
        straight = render(default_params(), small_cfg).pixels.astype(int)
        diffs = []
        for deg in (2.0, 0.5, 0.1, 0.01):
            p = params_for(ChannelId.CURVATURE, deg / 180.0, default_params())
            arc = render(p, small_cfg).pixels.astype(int)
            diffs.append(np.abs(arc - straight).max())
        assert all(b <= a for a, b in zip(diffs, diffs[1:]))
        assert diffs[-1] <= 2

    def test_centerline_overflow_guard(self, small_cfg):
        bad = StimulusParams(length_pct=1.0)
        oversized = object.__new__(StimulusParams)
        object.__setattr__(oversized, "mark", Mark.LINE_LIKE)
        for field, value in bad.to_dict().items():
            if field != "mark":
                object.__setattr__(oversized, field, value)
        object.__setattr__(oversized, "length_pct", 1.5)  # bypasses validation
        with pytest.raises(RenderError, match="exceeds canvas"):
            render(oversized, small_cfg)


class TestSquareGeometry:
    def test_quarter_area_square_has_half_side(self, small_cfg):
        p = params_for(ChannelId.AREA, 0.25, default_params())
        img = render(p, small_cfg)
        mass = ink_mass(img)
        assert mass == pytest.approx(0.25 * small_cfg.canvas_px**2, rel=1e-3)
        rows, cols = np.where(ink_mask(img))
        side = cols.max() - cols.min() + 1
        assert side == pytest.approx(small_cfg.canvas_px * 0.5, abs=1.0)

    def test_zero_area_renders_nothing(self, small_cfg):
        p = params_for(ChannelId.AREA, 0.0, default_params())
        img = render(p, small_cfg)
        assert not ink_mask(img).any()

    def test_full_area_fills_canvas(self, small_cfg):
        p = params_for(ChannelId.AREA, 1.0, default_params())
        img = render(p, small_cfg)
        assert ink_mask(img).all()

    def test_square_axis_aligned_and_centered(self, small_cfg):
        p = params_for(ChannelId.AREA, 0.25, default_params())
        img = render(p, small_cfg)
        rows, cols = np.where(ink_mask(img))
        c = (small_cfg.canvas_px - 1) / 2.0
        assert (rows.min() + rows.max()) / 2.0 == pytest.approx(c, abs=1.0)
        assert (cols.min() + cols.max()) / 2.0 == pytest.approx(c, abs=1.0)
        assert rows.max() - rows.min() == cols.max() - cols.min()


class TestAntialiasToggle:
    def test_antialias_off_is_binary(self):
        cfg = RenderConfig(canvas_px=64, stroke_px=4, antialias=False)
        img = render(default_params(), cfg)
        values = set(np.unique(img.pixels[:, :, 1]))
        assert values <= {0, 255}

    def test_antialias_on_has_intermediate_coverage(self, small_cfg):
        img = render(params_for(ChannelId.TILT, 0.37, default_params()), small_cfg)
        values = np.unique(img.pixels[:, :, 1])
        assert ((values > 0) & (values < 255)).any()
