"""Static SVG picture of the stretch map.

Draws the image squares of levels 3..depth colored by level, overlaid
with the image of a uniform mesh so the warp is visible.  Output is a
plain string with fixed float formatting: rendering the same
parameters twice yields identical bytes.
"""

from __future__ import annotations

import numpy as np

from .construction import (
    DEFAULT_CELL_CAP,
    MIN_LEVEL,
    ConstructionParams,
    enumerate_cells,
    image_square,
)
from .mapping import evaluate_batch

_VIEW = 1000.0
_LEVEL_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _to_view(xy: np.ndarray) -> np.ndarray:
    # unit square to SVG pixels, y flipped so the origin sits bottom-left
    out = np.empty_like(xy)
    out[:, 0] = xy[:, 0] * _VIEW
    out[:, 1] = (1.0 - xy[:, 1]) * _VIEW
    return out


def _polyline(img: np.ndarray) -> str:
    pts = _to_view(img)
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
    return (
        f'<polyline points="{coords}" fill="none" stroke="#333333" '
        'stroke-width="0.6"/>'
    )


def render_svg(
    params: ConstructionParams,
    depth: int,
    grid: int = 64,
    samples_per_cell: int = 8,
    cap: int = DEFAULT_CELL_CAP,
) -> str:
    """SVG drawing of the depth-truncated map, 1000x1000 view box.

    grid is the number of mesh cells per axis whose warped gridlines
    are drawn; 0 suppresses the mesh.  Each gridline is sampled
    samples_per_cell times per mesh cell so the sup-norm kinks show.
    Square enumeration honors cap like enumerate_cells.
    """
    if not MIN_LEVEL <= depth <= params.depth_max:
        raise ValueError(
            f"depth must lie in [{MIN_LEVEL}, depth_max={params.depth_max}], got {depth}"
        )
    if grid < 0 or samples_per_cell < 1:
        raise ValueError("grid must be >= 0 and samples_per_cell >= 1")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {int(_VIEW)} {int(_VIEW)}">',
        f'<rect x="0" y="0" width="{int(_VIEW)}" height="{int(_VIEW)}" fill="#ffffff"/>',
    ]
    for k in range(MIN_LEVEL, depth + 1):
        color = _LEVEL_COLORS[(k - MIN_LEVEL) % len(_LEVEL_COLORS)]
        for addr in enumerate_cells(k, params, cap=cap):
            sq = image_square(addr, params)
            x = (sq.center[0] - sq.side / 2.0) * _VIEW
            y = (1.0 - (sq.center[1] + sq.side / 2.0)) * _VIEW
            w = sq.side * _VIEW
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
                f'height="{_fmt(w)}" fill="{color}" fill-opacity="0.8"/>'
            )
    if grid > 0:
        m = samples_per_cell * grid + 1
        ts = np.linspace(0.0, 1.0, m)
        for i in range(grid + 1):
            fixed = np.full(m, i / grid)
            vertical = np.column_stack([fixed, ts])
            parts.append(_polyline(evaluate_batch(vertical, depth, params)))
            horizontal = np.column_stack([ts, fixed])
            parts.append(_polyline(evaluate_batch(horizontal, depth, params)))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
