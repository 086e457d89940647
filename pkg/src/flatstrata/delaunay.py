"""Delaunay retriangulation and covering radius.

An edge between two triangles is kept when the two angles opposite it sum
to at most pi (the empty-circumdisk condition, written with angles so it
works directly on cone surfaces).  Flipping any violating edge strictly
shrinks the local angle defect, so the queue below terminates; the budget
is a safety net, not a tuning knob.

The covering radius of the surface (the largest distance from any point
to the vertex set) is read off a Delaunay triangulation as the largest
triangle circumradius: the distance function to the vertices takes its
local maxima at circumcenters of Delaunay cells.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from . import geom, tracer
from .errors import FlipBudgetExceeded
from .surface import TranslationSurface, nxt, prv

ANGLE_SLACK = 1e-9


def _angle_sum(mut, e: int) -> float:
    """Sum of the two angles opposite the edge in slot e."""
    return mut.corner_angle(prv(e)) + mut.corner_angle(prv(mut.opp[e]))


def is_delaunay_edge(surface: TranslationSurface, e: int) -> bool:
    """Whether the edge satisfies the opposite-angle condition."""
    a = surface.corner_angle(prv(e))
    b = surface.corner_angle(prv(surface.opp[e]))
    return a + b <= math.pi + ANGLE_SLACK


@dataclass(frozen=True)
class DelaunayCertificate:
    flips_performed: int
    max_circumradius: float
    witness_triangle: int  # triangle realizing the max, in the output surface


def delaunayize(surface: TranslationSurface, flip_budget: int | None = None
                ) -> tuple[TranslationSurface, DelaunayCertificate]:
    """Flip to a Delaunay triangulation; the input is left untouched."""
    mut = surface.mutable()
    if flip_budget is None:
        flip_budget = 100 * sum(1 for _ in mut.live_triangles()) ** 2 + 1000
    queue = deque(e for e in mut.live_edges() if e < mut.opp[e])
    queued = set(queue)
    flips = 0
    while queue:
        e = queue.popleft()
        queued.discard(e)
        if _angle_sum(mut, e) <= math.pi + ANGLE_SLACK:
            continue
        flips += 1
        if flips > flip_budget:
            raise FlipBudgetExceeded(
                f"delaunay flipping exceeded {flip_budget} flips"
            )
        o = mut.opp[e]
        mut.flip_edge(e)
        for s in (nxt(e), prv(e), nxt(o), prv(o)):
            k = min(s, mut.opp[s])
            if k not in queued:
                queued.add(k)
                queue.append(k)
    out = mut.finalize()
    best_r, best_t = -math.inf, -1
    for t in range(out.n_triangles):
        r = geom.circumradius(out.vec[3 * t], out.vec[3 * t + 1])
        if r > best_r:
            best_r, best_t = r, t
    return out, DelaunayCertificate(flips, best_r, best_t)


def covering_radius(surface: TranslationSurface) -> float:
    """Largest distance from any point of the surface to the vertex set."""
    _, cert = delaunayize(surface)
    return cert.max_circumradius


def distance_to_singularities(surface: TranslationSurface, tri: int, p: complex,
                              upper_bound: float | None = None) -> float:
    """Distance from a point (canonical frame of tri) to the vertex set."""
    if upper_bound is None:
        upper_bound = covering_radius(surface) * 1.0001 + 1e-12
    return tracer.distance_to_vertices(surface, tri, p, upper_bound)
