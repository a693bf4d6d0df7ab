"""Chernoff-Bot glyphs: map model metadata to robot-face features and
render them as deterministic SVG.

Encoded dimensions: outlier share -> antenna curvature, typical share ->
antenna tip offset, activation -> antenna color, hidden layers -> eyes,
dropout -> body holes, batch size -> teeth lines, validation -> badge,
translation -> pupil offset, rotation -> mouth tilt, contrast -> earpiece
tones, inversion share -> eye/pupil color flip. The optimizer is not
encoded. Prediction confidence, when supplied, shows as cheek redness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .augment import adjust_contrast
from .campaign import ModelConfig, ModelMetadata

import numpy as np

VIEW_BOX = "0 0 120 140"

ACTIVATION_COLORS = {
    "elu": "#7FD4E8",          # Frost Fairy
    "exponential": "#CF5B23",  # Burning Orange
    "gelu": "#D72E34",         # Sizzling Red
    "hard_sigmoid": "#F27398", # Splash of Grenadine
    "linear": "#F3C620",       # Golden Glitter
    "relu": "#3B6FB6",         # Retro Blue
    "sigmoid": "#1CA9C9",      # Phosphorescent Blue
    "softmax": "#7C3E8F",      # Banafs Violet
    "swish": "#6FBE44",        # Blanka Green
    "tanh": "#E8651A",         # Forceful Orange
}

_EYE_BASE = (240, 240, 240)
_PUPIL_BASE = (20, 20, 20)
_EARPIECE_TONES = (96, 160)
_CHEEK_COLOR = "#E03131"


def teeth_lines(batch_size: int) -> int:
    """log2(batch size) - 5, defined for the five allowed batch sizes."""
    if batch_size not in (32, 64, 128, 256, 512):
        raise ValueError(f"batch_size {batch_size} not in the allowed set")
    return int(math.log2(batch_size)) - 5


@dataclass(frozen=True)
class GlyphFeatures:
    antenna_curvature: float
    antenna_tip_offset: float
    antenna_color: str
    eye_count: int
    body_holes: bool
    teeth_lines: int
    validation_badge: bool
    pupil_dx: int
    pupil_dy: int
    mouth_rotation_deg: int
    earpiece_contrast: float
    eye_inversion: float
    cheek_redness: float | None = None


def map_features(meta: ModelMetadata | ModelConfig,
                 confidence: float | None = None) -> GlyphFeatures:
    config = meta.config if isinstance(meta, ModelMetadata) else meta
    aug = config.augmentation
    return GlyphFeatures(
        antenna_curvature=config.outlier_pct,
        antenna_tip_offset=1.0 - config.typical_pct,
        antenna_color=ACTIVATION_COLORS[config.activation],
        eye_count=config.hidden_layers,
        body_holes=config.dropout,
        teeth_lines=teeth_lines(config.batch_size),
        validation_badge=config.use_validation,
        pupil_dx=aug.dx,
        pupil_dy=aug.dy,
        mouth_rotation_deg=aug.rotation_deg,
        earpiece_contrast=aug.contrast_factor,
        eye_inversion=aug.inversion_proportion,
        cheek_redness=None if confidence is None else 1.0 - confidence,
    )


def _lerp_to_inverse(base: tuple[int, int, int], t: float) -> str:
    channels = [int(math.floor(c + t * (255 - 2 * c) + 0.5)) for c in base]
    return "#{:02X}{:02X}{:02X}".format(*channels)


def _tone(value: int, factor: float) -> str:
    v = int(adjust_contrast(np.array([[value]], dtype=np.uint8), factor)[0, 0])
    return f"#{v:02X}{v:02X}{v:02X}"


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render_svg(features: GlyphFeatures) -> str:
    """Deterministic SVG text; every encoded feature is structurally
    recoverable from counts, transforms, fills and opacities."""
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 120 140" '
        'width="120" height="140">',
    ]

    # antenna: quadratic curve from the body top; control point bends by
    # 20 * curvature, tip slides by 12 * tip offset
    ctrl_x = 60 + 20 * features.antenna_curvature
    tip_x = 60 + 12 * features.antenna_tip_offset
    parts.append(
        f'<path class="antenna" d="M 60 50 Q {_fmt(ctrl_x)} 30 {_fmt(tip_x)} 14" '
        f'fill="none" stroke="{features.antenna_color}" stroke-width="3"/>'
    )
    parts.append(
        f'<circle class="antenna-tip" cx="{_fmt(tip_x)}" cy="14" r="3.5" '
        f'fill="{features.antenna_color}"/>'
    )

    parts.append(
        '<rect class="body" x="20" y="50" width="80" height="72" rx="10" '
        'fill="#AEB8C4" stroke="#5B6670" stroke-width="2"/>'
    )

    # earpieces, outer/inner tones from the contrast formula
    outer = _tone(_EARPIECE_TONES[0], features.earpiece_contrast)
    inner = _tone(_EARPIECE_TONES[1], features.earpiece_contrast)
    for x in (10, 102):
        parts.append(
            f'<rect class="earpiece" x="{x}" y="72" width="8" height="24" rx="3" '
            f'fill="{outer}"/>'
        )
        parts.append(
            f'<rect class="earpiece-inner" x="{x + 2}" y="78" width="4" height="12" '
            f'fill="{inner}"/>'
        )

    if features.cheek_redness is not None:
        opacity = _fmt(max(0.0, min(1.0, features.cheek_redness)))
        for cx in (34, 86):
            parts.append(
                f'<circle class="cheek" cx="{cx}" cy="88" r="7" '
                f'fill="{_CHEEK_COLOR}" opacity="{opacity}"/>'
            )

    eye_fill = _lerp_to_inverse(_EYE_BASE, features.eye_inversion)
    pupil_fill = _lerp_to_inverse(_PUPIL_BASE, features.eye_inversion)
    spacing = 26
    for i in range(features.eye_count):
        cx = 60 + (i - (features.eye_count - 1) / 2) * spacing
        parts.append(
            f'<circle class="eye" cx="{_fmt(cx)}" cy="70" r="9" fill="{eye_fill}" '
            'stroke="#5B6670" stroke-width="1.5"/>'
        )
        px = cx + 2 * features.pupil_dx
        py = 70 + 2 * features.pupil_dy
        parts.append(
            f'<circle class="pupil" cx="{_fmt(px)}" cy="{_fmt(py)}" r="3.5" '
            f'fill="{pupil_fill}"/>'
        )

    # mouth with vertical teeth lines, rotated as a group
    parts.append(
        f'<g class="mouth-group" transform="rotate({features.mouth_rotation_deg} 60 101)">'
    )
    parts.append(
        '<rect class="mouth" x="42" y="95" width="36" height="12" rx="4" '
        'fill="#3A4148"/>'
    )
    for i in range(features.teeth_lines):
        x = 42 + (i + 1) * 36 / (features.teeth_lines + 1)
        parts.append(
            f'<line class="tooth-line" x1="{_fmt(x)}" y1="96" x2="{_fmt(x)}" y2="106" '
            'stroke="#E8ECEF" stroke-width="1.5"/>'
        )
    parts.append("</g>")

    if features.body_holes:
        for cx in (44, 60, 76):
            parts.append(
                f'<circle class="hole" cx="{cx}" cy="115" r="2.5" fill="#5B6670"/>'
            )

    if features.validation_badge:
        parts.append(
            '<g class="badge-validation" transform="translate(90 54)">'
            '<circle cx="0" cy="0" r="7" fill="#2F9E44"/>'
            '<path d="M -3 0 L -1 2.5 L 3.5 -2.5" fill="none" stroke="#FFFFFF" '
            'stroke-width="1.8"/></g>'
        )

    parts.append("</svg>")
    return "".join(parts)
