"""Small reference surfaces used by tests, docs, and the CLI presets."""

from __future__ import annotations

import cmath
import math

from .surface import TranslationSurface, build_from_polygon, build_square_tiled


def unit_torus() -> TranslationSurface:
    """Unit square torus with one marked point; area 1, stratum (0)."""
    return build_from_polygon(
        [0j, 1 + 0j, 1 + 1j, 1j],
        [(0, 2), (1, 3)],
        allow_marked_points=True,
    )


def flat_torus(width: float, height: float) -> TranslationSurface:
    """width x height rectangle torus with one marked point."""
    return build_from_polygon(
        [0j, width + 0j, complex(width, height), complex(0, height)],
        [(0, 2), (1, 3)],
        allow_marked_points=True,
    )


def l_origami() -> TranslationSurface:
    """Three-square L origami in H(2); area 3 (not normalized).

    Squares 0,1 side by side in the bottom row, square 2 on top of
    square 0: h swaps 0,1 and v swaps 0,2.
    """
    return build_square_tiled(3, [1, 0, 2], [2, 1, 0])


def regular_octagon() -> TranslationSurface:
    """Regular octagon, side 1, opposite sides glued; H(2), area 2(1+sqrt 2)."""
    dirs = [cmath.exp(1j * math.pi * k / 4.0) for k in range(8)]
    pts = [0j]
    for d in dirs[:-1]:
        pts.append(pts[-1] + d)
    return build_from_polygon(pts, [(k, k + 4) for k in range(4)])
