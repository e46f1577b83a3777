"""Deterministic panel rasterizer (PGM P5) and SVG writer.

Geometry is computed once in floating point, rounded to 1/16-pixel fixed
point, and every inside test after that is integer arithmetic, so output is
byte-identical across platforms. No anti-aliasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import DEFAULT_DOMAIN, AttributeDomain, Configuration, slots_of
from .errors import ContractViolation, DegenerateBeliefError
from .execution import PredictedScene
from .symbols import ComponentSymbol, PanelSymbol

SUBPIXEL = 16
# Shape index -> polygon vertex count; 0 means circle.
SHAPE_SIDES = (3, 4, 5, 6, 0)


@dataclass(frozen=True)
class RenderOptions:
    width: int = 160
    height: int = 160
    stroke: int = 2
    rotation_seed: int | None = None


@dataclass(frozen=True)
class PanelRaster:
    width: int
    height: int
    pixels: np.ndarray  # uint8, (height, width); 0 = stroke, 255 = background

    def to_pgm(self) -> bytes:
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + np.ascontiguousarray(self.pixels, dtype=np.uint8).tobytes()

    def save(self, path) -> Path:
        path = Path(path)
        path.write_bytes(self.to_pgm())
        return path


def grey_level(color: int, domain: AttributeDomain = DEFAULT_DOMAIN) -> int:
    """Fill grey for a color level: 0 is white, the last level is black."""
    return 255 - round(255 * color / max(domain.colors - 1, 1))


def size_scale(size: int, domain: AttributeDomain = DEFAULT_DOMAIN) -> float:
    """Fraction of the slot half-extent used as the shape's circumradius."""
    return 0.4 + 0.5 * size / max(domain.sizes - 1, 1)


@dataclass(frozen=True)
class _Shape:
    sides: int
    cx: int  # fixed point
    cy: int
    radius: int
    vertices: tuple[tuple[int, int], ...]
    grey: int


def _layout_shapes(panel: PanelSymbol, config: Configuration, options: RenderOptions,
                   domain: AttributeDomain) -> list[_Shape]:
    if len(panel.components) != len(config.components):
        raise ContractViolation(f"{config.name} has {len(config.components)} components, panel has {len(panel.components)}")
    rng = np.random.default_rng(options.rotation_seed) if options.rotation_seed is not None else None
    shapes = []
    for comp, layout in zip(panel.components, config.components):
        if comp.type >= len(SHAPE_SIDES):
            raise ContractViolation(f"no shape for type index {comp.type}")
        sides = SHAPE_SIDES[comp.type]
        for slot in sorted(comp.occupied):
            geo = layout.slots[slot]
            cx = geo.center_x * options.width
            cy = geo.center_y * options.height
            half = geo.max_extent * min(options.width, options.height) / 2
            r = half * size_scale(comp.size, domain)
            turn = float(rng.uniform(0, 2 * math.pi)) if rng is not None else 0.0
            verts = ()
            if sides:
                start = -math.pi / 2 + turn
                verts = tuple(
                    (round((cx + r * math.cos(start + 2 * math.pi * k / sides)) * SUBPIXEL),
                     round((cy + r * math.sin(start + 2 * math.pi * k / sides)) * SUBPIXEL))
                    for k in range(sides)
                )
            shapes.append(_Shape(sides, round(cx * SUBPIXEL), round(cy * SUBPIXEL), round(r * SUBPIXEL),
                                 verts, grey_level(comp.color, domain)))
    return shapes


def _inside(shape: _Shape, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    if not shape.sides:
        dx, dy = px - shape.cx, py - shape.cy
        return dx * dx + dy * dy <= shape.radius * shape.radius
    mask = np.ones(px.shape, dtype=bool)
    verts = shape.vertices
    for (x0, y0), (x1, y1) in zip(verts, verts[1:] + verts[:1]):
        # Vertices run clockwise in image coordinates; interior is on the right.
        mask &= (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0) >= 0
    return mask


def _erode(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    out[1:, :] &= mask[:-1, :]
    out[:-1, :] &= mask[1:, :]
    out[:, 1:] &= mask[:, :-1]
    out[:, :-1] &= mask[:, 1:]
    out[0, :] = out[-1, :] = False
    out[:, 0] = out[:, -1] = False
    return out


def render_panel(panel: PanelSymbol, config: Configuration, options: RenderOptions | None = None,
                 domain: AttributeDomain = DEFAULT_DOMAIN) -> PanelRaster:
    """Rasterize one panel; later components paint over earlier ones."""
    options = options or RenderOptions()
    if options.width <= 0 or options.height <= 0:
        raise ContractViolation("raster dimensions must be positive")
    ys, xs = np.mgrid[0:options.height, 0:options.width].astype(np.int64)
    px = xs * SUBPIXEL + SUBPIXEL // 2
    py = ys * SUBPIXEL + SUBPIXEL // 2
    pixels = np.full((options.height, options.width), 255, dtype=np.uint8)
    for shape in _layout_shapes(panel, config, options, domain):
        inside = _inside(shape, px, py)
        core = inside
        for _ in range(options.stroke):
            core = _erode(core)
        pixels[inside] = 0
        pixels[core] = shape.grey
    return PanelRaster(options.width, options.height, pixels)


def render_svg(panel: PanelSymbol, config: Configuration, options: RenderOptions | None = None,
               domain: AttributeDomain = DEFAULT_DOMAIN) -> str:
    options = options or RenderOptions()
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{options.width}" '
        f'height="{options.height}" shape-rendering="crispEdges">',
        f'<rect width="{options.width}" height="{options.height}" fill="#ffffff"/>',
    ]
    for s in _layout_shapes(panel, config, options, domain):
        paint = f'fill="#{s.grey:02x}{s.grey:02x}{s.grey:02x}" stroke="#000000" stroke-width="{options.stroke}"'
        if s.sides:
            pts = " ".join(f"{x / SUBPIXEL:.4f},{y / SUBPIXEL:.4f}" for x, y in s.vertices)
            lines.append(f'<polygon points="{pts}" {paint}/>')
        else:
            lines.append(f'<circle cx="{s.cx / SUBPIXEL:.4f}" cy="{s.cy / SUBPIXEL:.4f}" '
                         f'r="{s.radius / SUBPIXEL:.4f}" {paint}/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _draw(probs: np.ndarray, rng: np.random.Generator, what: str) -> int:
    total = probs.sum()
    if not np.isfinite(total) or abs(total - 1.0) > 1e-6:
        raise DegenerateBeliefError(f"{what} distribution sums to {total}")
    return int(rng.choice(len(probs), p=probs / total))


def sample_symbol(pred: PredictedScene, seed) -> PanelSymbol:
    """Draw a position subset, then type, size and color, per component."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    comps = []
    for belief in pred.belief.components:
        mask = _draw(belief.probs("position"), rng, "position") + 1
        comps.append(ComponentSymbol(
            slots_of(mask),
            _draw(belief.probs("type"), rng, "type"),
            _draw(belief.probs("size"), rng, "size"),
            _draw(belief.probs("color"), rng, "color"),
        ))
    return PanelSymbol(tuple(comps))


def sample_and_render(pred: PredictedScene, config: Configuration, seed, options: RenderOptions | None = None,
                      domain: AttributeDomain = DEFAULT_DOMAIN) -> tuple[PanelSymbol, PanelRaster]:
    symbol = sample_symbol(pred, seed)
    return symbol, render_panel(symbol, config, options, domain)
