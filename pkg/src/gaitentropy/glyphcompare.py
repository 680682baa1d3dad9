"""Star-glyph figures and condition-difference tables.

A star glyph draws one polygon per walking condition over K joint
spokes: spoke k points at angle 90 - 360k/K degrees (first joint at the
top, then clockwise), and the vertex radius is that joint's mean
entropy divided by a scale shared across every overlaid condition, so
shapes are directly comparable.  Line styles tell the conditions apart:
KB solid, AB dotted, NW dashed.

``render_svg`` emits the figure as deterministic standalone SVG: same
figure in, byte-identical text out, which is what makes golden-file
testing of the rendering possible.

``compare_conditions`` is the numeric counterpart of overlaying two
glyphs: per joint, the difference of means against the pooled
across-trial spread, flagged where the difference exceeds ``k_sd``
pooled standard deviations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .core import Condition, JointId
from .profile import ConditionProfile

LINE_STYLES = {
    Condition.KB: "solid",
    Condition.AB: "dotted",
    Condition.NW: "dashed",
}

# stroke-dasharray per line style, in SVG user units
_DASH = {"solid": None, "dotted": "2,5", "dashed": "9,6"}

_CANVAS = 600
_CENTER = 300.0
_RADIUS = 220.0  # outer ring radius in canvas units


class GlyphPolygon(NamedTuple):
    condition: Condition
    vertices: tuple[tuple[float, float], ...]  # unit-circle figure space, y up
    line_style: str


@dataclass(frozen=True)
class GlyphFigure:
    """Geometry of one star-glyph figure, in unit-circle coordinates."""

    joints: tuple[JointId, ...]
    scale_max: float
    polygons: tuple[GlyphPolygon, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.joints):
            raise ValueError("one label per joint required")
        for poly in self.polygons:
            if len(poly.vertices) != len(self.joints):
                raise ValueError(
                    f"{poly.condition.value}: vertex count must equal joint count")


def round_up_1sig(value: float) -> float:
    """Smallest one-significant-digit number >= value (for axis scales)."""
    if value <= 0:
        raise ValueError(f"need a positive value, got {value}")
    exponent = math.floor(math.log10(value))
    q = math.ceil(value / 10 ** exponent - 1e-9)
    if q * 10 ** exponent < value:  # guard against the 1e-9 slack undershooting
        q += 1
    if q == 10:
        q, exponent = 1, exponent + 1
    return q * 10 ** exponent


def _spoke_angle(k: int, n: int) -> float:
    """Spoke angle in radians: 90 degrees minus k/n turns (clockwise)."""
    return math.pi / 2 - 2 * math.pi * k / n


def glyph_layout(profiles: Sequence[ConditionProfile], joints: Iterable[JointId],
                 scale_max: float | None = None) -> GlyphFigure:
    """Lay out one polygon per profile over the joint spokes.

    ``scale_max`` of None picks the maximum observed mean rounded up to
    one significant digit; an explicit value must cover every mean.
    All polygons share the scale.
    """
    joints = tuple(joints)
    if len(joints) < 3:
        raise ValueError(f"a glyph needs at least 3 joints, got {len(joints)}")
    if not profiles:
        raise ValueError("need at least one profile")
    for p in profiles:
        for j in joints:
            if j not in p.entries:
                raise ValueError(
                    f"joint {j} missing from profile {p.subject_id}/{p.condition.value}")
    observed_max = max(p.entries[j].mean for p in profiles for j in joints)
    if scale_max is None:
        scale_max = round_up_1sig(observed_max) if observed_max > 0 else 1.0
    elif observed_max > scale_max:
        raise ValueError(
            f"scale_max {scale_max} is below the largest mean {observed_max}")
    polygons = []
    for p in profiles:
        vertices = []
        for k, j in enumerate(joints):
            r = p.entries[j].mean / scale_max
            theta = _spoke_angle(k, len(joints))
            vertices.append((r * math.cos(theta), r * math.sin(theta)))
        polygons.append(GlyphPolygon(condition=p.condition, vertices=tuple(vertices),
                                     line_style=LINE_STYLES[p.condition]))
    return GlyphFigure(joints=joints, scale_max=scale_max,
                       polygons=tuple(polygons),
                       labels=tuple(j.value for j in joints))


def _f2(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _to_canvas(vertex: tuple[float, float]) -> tuple[float, float]:
    x, y = vertex
    return _CENTER + x * _RADIUS, _CENTER - y * _RADIUS  # SVG y grows downward


def render_svg(figure: GlyphFigure) -> str:
    """Standalone deterministic SVG for a glyph figure.

    Fixed 600x600 canvas, grid rings at 25/50/75/100 percent of the
    scale, labeled spokes, and a legend mapping each condition to its
    line style.  Identical figures produce byte-identical text.
    """
    n = len(figure.joints)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_CANVAS}" height="{_CANVAS}" '
        f'viewBox="0 0 {_CANVAS} {_CANVAS}" font-family="sans-serif">',
        f'<rect width="{_CANVAS}" height="{_CANVAS}" fill="#ffffff"/>',
    ]
    for frac in (0.25, 0.5, 0.75, 1.0):
        parts.append(f'<circle cx="{_f2(_CENTER)}" cy="{_f2(_CENTER)}" '
                     f'r="{_f2(_RADIUS * frac)}" fill="none" stroke="#bbbbbb" '
                     'stroke-width="1"/>')
        parts.append(f'<text x="{_f2(_CENTER + 4)}" y="{_f2(_CENTER - _RADIUS * frac - 4)}" '
                     f'font-size="11" fill="#888888">{_f2(figure.scale_max * frac)}</text>')
    for k, label in enumerate(figure.labels):
        theta = _spoke_angle(k, n)
        ex, ey = _to_canvas((math.cos(theta), math.sin(theta)))
        parts.append(f'<line x1="{_f2(_CENTER)}" y1="{_f2(_CENTER)}" '
                     f'x2="{_f2(ex)}" y2="{_f2(ey)}" stroke="#bbbbbb" stroke-width="1"/>')
        lx, ly = _to_canvas((1.12 * math.cos(theta), 1.12 * math.sin(theta)))
        parts.append(f'<text x="{_f2(lx)}" y="{_f2(ly + 4)}" font-size="13" '
                     f'fill="#333333" text-anchor="middle">{label}</text>')
    for poly in figure.polygons:
        points = " ".join(f"{_f2(px)},{_f2(py)}"
                          for px, py in (_to_canvas(v) for v in poly.vertices))
        dash = _DASH[poly.line_style]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(f'<polygon points="{points}" fill="none" stroke="#000000" '
                     f'stroke-width="2"{dash_attr}/>')
    for i, poly in enumerate(figure.polygons):
        y = 24 + 20 * i
        dash = _DASH[poly.line_style]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(f'<line x1="20" y1="{y}" x2="56" y2="{y}" stroke="#000000" '
                     f'stroke-width="2"{dash_attr}/>')
        parts.append(f'<text x="62" y="{y + 4}" font-size="13" fill="#333333">'
                     f'{poly.condition.value} ({poly.condition.long_name})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


class DeltaRow(NamedTuple):
    joint: JointId
    cond_a: Condition
    cond_b: Condition
    mean_a: float
    mean_b: float
    delta: float       # mean_b - mean_a, exactly
    within_sd: float   # pooled across-trial SD
    flagged: bool


@dataclass(frozen=True)
class DeltaTable:
    subject_id: str
    camera: str
    k_sd: float
    rows: tuple[DeltaRow, ...]


def compare_conditions(a: ConditionProfile, b: ConditionProfile,
                       joints: Iterable[JointId], k_sd: float = 2.0) -> DeltaTable:
    """Per-joint difference of condition means against pooled trial spread.

    A joint is flagged when |mean_b - mean_a| exceeds ``k_sd`` pooled
    standard deviations; with zero pooled spread, any nonzero difference
    flags.  Swapping the profiles negates deltas and preserves flags.
    """
    if a.subject_id != b.subject_id or a.camera != b.camera:
        raise ValueError(
            f"profiles must share subject and camera, got {a.subject_id}/{a.camera.value}"
            f" vs {b.subject_id}/{b.camera.value}")
    if k_sd <= 0:
        raise ValueError(f"k_sd must be > 0, got {k_sd}")
    rows = []
    for j in joints:
        for prof in (a, b):
            if j not in prof.entries:
                raise ValueError(
                    f"joint {j} missing from profile "
                    f"{prof.subject_id}/{prof.condition.value}/{prof.camera.value}")
        sa, sb = a.entries[j], b.entries[j]
        delta = sb.mean - sa.mean
        pooled = math.sqrt((sa.sd ** 2 + sb.sd ** 2) / 2)
        flagged = abs(delta) > k_sd * pooled if pooled > 0 else abs(delta) > 0
        rows.append(DeltaRow(joint=j, cond_a=a.condition, cond_b=b.condition,
                             mean_a=sa.mean, mean_b=sb.mean, delta=delta,
                             within_sd=pooled, flagged=flagged))
    return DeltaTable(subject_id=a.subject_id, camera=a.camera.value,
                      k_sd=k_sd, rows=tuple(rows))


def write_delta_csv(table: DeltaTable, extra_comments: Iterable[str] = ()) -> str:
    """Delta table CSV with identity and threshold in comment headers."""
    lines = [f"# {c}" for c in extra_comments]
    lines += [
        f"# subject: {table.subject_id}",
        f"# camera: {table.camera}",
        f"# k_sd: {repr(float(table.k_sd))}",
        "joint,cond_a,cond_b,mean_a,mean_b,delta,pooled_sd,flagged",
    ]
    for r in table.rows:
        lines.append(f"{r.joint},{r.cond_a.value},{r.cond_b.value},"
                     f"{repr(float(r.mean_a))},{repr(float(r.mean_b))},"
                     f"{repr(float(r.delta))},{repr(float(r.within_sd))},"
                     f"{'true' if r.flagged else 'false'}")
    return "\n".join(lines) + "\n"
