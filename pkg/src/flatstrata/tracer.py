"""Geodesic search on translation surfaces.

Three engines share this module:

- a breadth-first wedge search that unfolds the surface across triangle
  edges and reports every vertex visible from a source within a radius
  (the workhorse behind saddle connections and distance queries),
- a straight-line walker that develops a single segment across gluings,
- a clipped development that lists every sheet of the surface meeting a
  metric disk (used for embeddedness checks).

Developments use translations only; there is never a rotation to track.
All positions are complex numbers in the developed plane with the source
at the origin, or in a triangle's canonical frame (corner 3t at 0).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from . import geom
from .errors import BudgetExceeded
from .surface import TranslationSurface, nxt, prv

DEFAULT_BUDGET = 1_000_000

# sector membership: strictly inside means the cross products clear this
# relative margin; directions on the boundary are blocked by the vertex
# that created the boundary
_SECTOR_EPS = 1e-12
# relative slack on the search radius (lengths exactly at the radius count)
_RADIUS_EPS = 1e-9


@dataclass(frozen=True)
class VertexHit:
    """A straight segment from the source to a vertex, vertex-free inside.

    source_corner is the corner half-edge whose sector emitted the segment
    (-1 for point sources).  target_corner starts at the vertex reached.
    crossings list (entered_half_edge, entry_point) pairs, entry points in
    the canonical frame of the entered half-edge's triangle.
    """

    source_corner: int
    target_corner: int
    holonomy: complex
    crossings: tuple

    @property
    def length(self) -> float:
        return abs(self.holonomy)


def _min_dist_to_clipped_segment(lo, hi, lo_dir, hi_dir) -> float:
    """Distance from origin to [lo,hi] restricted to the open sector."""
    d = hi - lo
    dd = geom.dot(d, d)
    # clip parameter range by the two sector half-planes
    s_min, s_max = 0.0, 1.0
    for a, sign in ((lo_dir, 1.0), (hi_dir, -1.0)):
        num = sign * geom.cross(a, lo)
        den = sign * geom.cross(a, d)
        # constraint: num + s*den >= 0  (ray side of boundary a)
        if abs(den) < 1e-300:
            if num < 0.0:
                return math.inf
            continue
        bound = -num / den
        if den > 0.0:
            s_min = max(s_min, bound)
        else:
            s_max = min(s_max, bound)
    if s_min > s_max:
        return math.inf
    if dd <= 0.0:
        return abs(lo)
    s_best = min(max(-geom.dot(lo, d) / dd, s_min), s_max)
    return abs(lo + s_best * d)


def _wedge_search(surface: TranslationSurface, seeds, radius, budget, source_corner):
    """Expand wedge states breadth-first; return vertex hits.

    seeds: iterable of (entered_half_edge, lo_pt, hi_pt, lo_dir, hi_dir).
    """
    opp, vec = surface.opp, surface.vec
    rad = radius * (1.0 + _RADIUS_EPS) + 1e-15
    # parent chain state: (entered h, lo, hi, parent index)
    chain = []
    queue = deque()
    hits = []
    for h, lo, hi, lo_dir, hi_dir in seeds:
        chain.append((h, lo, hi, -1))
        queue.append((len(chain) - 1, lo_dir, hi_dir))
    popped = 0
    while queue:
        idx, lo_dir, hi_dir = queue.popleft()
        popped += 1
        if popped > budget:
            raise BudgetExceeded(
                f"wedge search exceeded {budget} states at radius {radius}"
            )
        h, lo, hi, _parent = chain[idx]
        if _min_dist_to_clipped_segment(lo, hi, lo_dir, hi_dir) > rad:
            continue
        apex = lo + vec[nxt(h)]
        ca = geom.cross(lo_dir, apex)
        cb = geom.cross(apex, hi_dir)
        tol_a = _SECTOR_EPS * abs(lo_dir) * abs(apex)
        tol_b = _SECTOR_EPS * abs(apex) * abs(hi_dir)
        if ca > tol_a and cb > tol_b:
            # apex visible: vertex hit plus both sub-wedges
            if abs(apex) <= rad:
                hits.append((idx, prv(h), apex))
            chain.append((opp[nxt(h)], lo, apex, idx))
            queue.append((len(chain) - 1, lo_dir, apex))
            chain.append((opp[prv(h)], apex, hi, idx))
            queue.append((len(chain) - 1, apex, hi_dir))
        elif ca <= tol_a:
            # apex at or before the lo boundary: everything exits far side
            chain.append((opp[prv(h)], apex, hi, idx))
            queue.append((len(chain) - 1, lo_dir, hi_dir))
        else:
            chain.append((opp[nxt(h)], lo, apex, idx))
            queue.append((len(chain) - 1, lo_dir, hi_dir))

    out = []
    for idx, target_corner, apex in hits:
        crossings = []
        j = idx
        while j >= 0:
            h, lo, hi, parent = chain[j]
            # entry point: segment 0->apex meets the line through lo, hi
            params = geom.seg_intersection_params(0j, apex, lo, hi - lo)
            if params is None:
                entry_dev = lo
            else:
                entry_dev = lo + params[1] * (hi - lo)
            offset = hi - surface.corner_position(h)
            crossings.append((h, entry_dev - offset))
            j = parent
        crossings.reverse()
        out.append(
            VertexHit(
                source_corner=source_corner,
                target_corner=target_corner,
                holonomy=apex,
                crossings=tuple(crossings),
            )
        )
    return out


def corner_hits(surface: TranslationSurface, corner: int, radius: float,
                budget: int = DEFAULT_BUDGET) -> list[VertexHit]:
    """All vertex-to-vertex segments leaving through one corner's sector.

    Includes the corner's own spoke (the edge itself) when short enough;
    segments along the other spoke belong to the neighbouring corner.
    """
    vec = surface.vec
    rad = radius * (1.0 + _RADIUS_EPS) + 1e-15
    hits = []
    if abs(vec[corner]) <= rad:
        hits.append(
            VertexHit(
                source_corner=corner,
                target_corner=surface.opp[corner],
                holonomy=vec[corner],
                crossings=(),
            )
        )
    lo = vec[corner]
    hi = vec[corner] + vec[nxt(corner)]
    seeds = [(surface.opp[nxt(corner)], lo, hi, lo, hi)]
    hits.extend(_wedge_search(surface, seeds, radius, budget, corner))
    return hits


def vertex_hits(surface: TranslationSurface, radius: float, vertices=None,
                budget: int = DEFAULT_BUDGET) -> list[VertexHit]:
    """Vertex-to-vertex segments from every corner of the given vertices.

    vertices: indices into surface.vertices (default: all of them).
    """
    if vertices is None:
        vertices = range(len(surface.vertices))
    hits = []
    for vi in vertices:
        for c in surface.vertices[vi].corners:
            hits.extend(corner_hits(surface, c, radius, budget=budget))
    return hits


def interior_point(surface: TranslationSurface, tri: int, p: complex,
                   blend: float = 1e-12) -> complex:
    """Pull a point a relative hair toward the centroid of its triangle."""
    pts = [surface.corner_position(3 * tri + k) for k in range(3)]
    centroid = sum(pts) / 3.0
    return p + (centroid - p) * blend


def point_hits(surface: TranslationSurface, tri: int, p: complex, radius: float,
               budget: int = DEFAULT_BUDGET) -> list[VertexHit]:
    """Vertices visible from an interior point of a triangle.

    p is in the canonical frame of triangle tri; a point on the triangle
    boundary is nudged inside by a relative 1e-12 (distance queries keep
    far more tolerance than that).  Hits report source_corner = -1.
    """
    vec = surface.vec
    rad = radius * (1.0 + _RADIUS_EPS) + 1e-15
    for blend in (0.0, 1e-12, 1e-9):
        q = p if blend == 0.0 else interior_point(surface, tri, p, blend)
        if all(
            geom.cross(surface.corner_position(3 * tri + k) - q,
                       surface.corner_position(3 * tri + k) - q + vec[3 * tri + k])
            > 0.0
            for k in range(3)
        ):
            p = q
            break
    else:
        raise ValueError("point is not inside the triangle")
    hits = []
    seeds = []
    for k in range(3):
        e = 3 * tri + k
        a = surface.corner_position(e) - p
        b = a + vec[e]
        if abs(a) <= rad:
            hits.append(VertexHit(-1, e, a, ()))
        seeds.append((surface.opp[e], a, b, a, b))
    hits.extend(_wedge_search(surface, seeds, radius, budget, -1))
    return hits


def distance_to_vertices(surface: TranslationSurface, tri: int, p: complex,
                         upper_bound: float, budget: int = DEFAULT_BUDGET) -> float:
    """Distance from a point to the vertex set, given any valid upper bound."""
    r = upper_bound
    for _ in range(40):
        found = point_hits(surface, tri, p, r, budget=budget)
        if found:
            return min(h.length for h in found)
        r *= 2.0
    raise BudgetExceeded("no vertex found within any tried radius")


# ----------------------------------------------------------------- walker


@dataclass(frozen=True)
class WalkStep:
    triangle: int
    entry: complex  # canonical frame of triangle
    exit: complex
    exit_edge: int  # half-edge crossed on leaving, -1 on the last step
    exit_param: float  # position of the crossing along exit_edge, in (0,1)


class WalkHitVertex(Exception):
    """Straight walk ran into a vertex; carries the steps walked so far."""

    def __init__(self, steps):
        self.steps = steps
        super().__init__("straight walk hit a vertex")


def walk(surface: TranslationSurface, tri: int, p: complex, disp: complex,
         max_steps: int = 100_000) -> list[WalkStep]:
    """Develop the segment from p to p + disp across gluings.

    p is in the canonical frame of tri.  Returns one WalkStep per triangle
    visited.  Raises WalkHitVertex if the open segment meets a vertex
    (callers either retry with a nudged segment or handle the vertex).
    """
    opp, vec = surface.opp, surface.vec
    steps: list[WalkStep] = []
    t = tri
    pos = p
    remaining = 1.0  # fraction of disp still to walk
    cur_disp = disp
    for _ in range(max_steps):
        # find the exit side: smallest positive crossing of the ray
        best = None
        for k in range(3):
            e = 3 * t + k
            a = surface.corner_position(e)
            params = geom.seg_intersection_params(pos, cur_disp, a, vec[e])
            if params is None:
                continue
            s, u = params
            if s <= 1e-12:
                continue
            if -1e-12 < u < 1.0 + 1e-12:
                if best is None or s < best[0]:
                    best = (s, u, e)
        if best is None or best[0] >= 1.0 - 1e-12:
            # ends inside this triangle
            steps.append(WalkStep(t, pos, pos + cur_disp, -1, math.nan))
            return steps
        s, u, e = best
        if u < 1e-12 or u > 1.0 - 1e-12:
            steps.append(WalkStep(t, pos, pos + s * cur_disp, e, u))
            raise WalkHitVertex(steps)
        exit_pt = pos + s * cur_disp
        steps.append(WalkStep(t, pos, exit_pt, e, u))
        h = opp[e]
        # same physical point on the far side, param measured from start(h)
        pos = surface.corner_position(h) + (1.0 - u) * vec[h]
        cur_disp = (1.0 - s) * cur_disp
        t = h // 3
    raise BudgetExceeded(f"straight walk exceeded {max_steps} steps")


def locate(surface: TranslationSurface, tri: int, p: complex,
           disp: complex) -> tuple[int, complex]:
    """Triangle and local position of the point at p + disp."""
    steps = walk(surface, tri, p, disp)
    last = steps[-1]
    return last.triangle, last.exit


# ------------------------------------------------- clipped development


@dataclass(frozen=True)
class DevTriangle:
    triangle: int
    offset: complex  # developed position = canonical position + offset


def develop_within(surface: TranslationSurface, tri: int, p: complex,
                   radius: float, budget: int = 20_000) -> list[DevTriangle]:
    """Every sheet of the surface whose triangle meets the open disk.

    The disk has the given radius about p (canonical frame of tri, the
    developed origin).  The same triangle may appear several times with
    different offsets; that is exactly how overlaps are detected.
    """
    opp, vec = surface.opp, surface.vec
    scale = max(1.0, abs(radius))
    quantum = 1e-9 * scale

    def sheet_key(t, off):
        return (t, round(off.real / quantum), round(off.imag / quantum))

    start = DevTriangle(tri, -p)
    seen = {sheet_key(tri, -p)}
    out = [start]
    queue = deque([start])
    while queue:
        dt = queue.popleft()
        if len(out) > budget:
            raise BudgetExceeded("disk development exceeded its sheet budget")
        for k in range(3):
            e = 3 * dt.triangle + k
            a = surface.corner_position(e) + dt.offset
            b = a + vec[e]
            # does the shared edge come within the disk?
            d = b - a
            dd = geom.dot(d, d)
            s = 0.0 if dd == 0.0 else min(max(-geom.dot(a, d) / dd, 0.0), 1.0)
            if abs(a + s * d) >= radius:
                continue
            h = opp[e]
            t2 = h // 3
            # offset of the neighbour sheet: end(h) must land on start(e)
            off2 = a - surface.corner_position(nxt(h))
            key = sheet_key(t2, off2)
            if key in seen:
                continue
            seen.add(key)
            nxt_dt = DevTriangle(t2, off2)
            out.append(nxt_dt)
            queue.append(nxt_dt)
    return out
