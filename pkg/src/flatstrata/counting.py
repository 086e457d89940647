"""Saddle connections, cylinders, and the four-region classification.

Saddle connections come out of the wedge tracer; this module fixes the
unoriented counting convention (each geometric segment once) and layers
cylinder detection on top.

Cylinder detection works per direction family.  A boundary component of
a flat cylinder, traversed with the cylinder on its left, turns by
exactly pi at every vertex it passes (all the excess cone angle sits on
the other side).  So boundary components are precisely the cycles of the
"continue straight with a left angle of pi" map on oriented saddle
connections of the family.  The strip left of such a cycle is swept with
a perpendicular probe; the first crossing with the family is the
opposite boundary, and the probe distance is the height.  A cone point
in the interior would lie on a leaf fully covered by family connections,
which the probe cannot miss, so a clean probe certifies the cylinder.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import geom, tracer
from .delaunay import delaunayize
from .errors import FlatstrataError
from .surface import TranslationSurface, nxt, prv

PARALLEL_TOL = 1e-10
LENGTH_TOL = 1e-9


@dataclass(frozen=True)
class SaddleConnection:
    """A vertex-to-vertex straight segment with no vertex inside.

    Holonomy is the displacement from the source vertex; corners name the
    outgoing and incoming prongs.  crossings is the tracer's polyline
    data (entered half-edge, entry point in that triangle's frame).
    """

    source_corner: int
    target_corner: int
    holonomy: complex
    crossings: tuple

    @property
    def length(self) -> float:
        return abs(self.holonomy)


def _is_canonical(v: complex) -> bool:
    im = 0.0 if abs(v.imag) <= LENGTH_TOL * abs(v) else v.imag
    return im > 0.0 or (im == 0.0 and v.real > 0.0)


def _oriented_hits(surface: TranslationSurface, delta: float,
                   budget: int) -> list[tracer.VertexHit]:
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    return tracer.vertex_hits(surface, delta, budget=budget)


def saddle_connections(surface: TranslationSurface, delta: float,
                       budget: int = tracer.DEFAULT_BUDGET
                       ) -> tuple[SaddleConnection, ...]:
    """All saddle connections of length <= delta, one per geometric segment.

    The representative orientation points upward (ties: rightward).
    Sorted by length, then direction angle.
    """
    hits = _oriented_hits(surface, delta, budget)
    out = [
        SaddleConnection(h.source_corner, h.target_corner, h.holonomy, h.crossings)
        for h in hits
        if _is_canonical(h.holonomy)
    ]
    out.sort(key=lambda s: (s.length, cmath.phase(s.holonomy), s.source_corner))
    return tuple(out)


def n_sc(surface: TranslationSurface, delta: float,
         budget: int = tracer.DEFAULT_BUDGET) -> int:
    return len(saddle_connections(surface, delta, budget=budget))


# ------------------------------------------------------------- cylinders


@dataclass(frozen=True)
class Cylinder:
    """A maximal flat cylinder.

    boundary holds the two boundary components, each a cyclic tuple of
    SaddleConnection oriented so the cylinder lies on its left; the two
    components therefore carry opposite directions.  Areas are absolute
    and as a fraction of the surface area.
    """

    direction: complex  # unit, canonical orientation
    circumference: float
    height: float
    area: float
    area_fraction: float
    boundary: tuple

    @property
    def n_boundary_connections(self) -> int:
        return len(self.boundary[0]) + len(self.boundary[1])


def _unit(v: complex) -> complex:
    return v / abs(v)


def _canonical_direction(u: complex) -> complex:
    im = 0.0 if abs(u.imag) <= LENGTH_TOL else u.imag
    if im < 0.0 or (im == 0.0 and u.real < 0.0):
        return -u
    return u


def _direction_families(hits) -> list[list[int]]:
    """Group oriented hit indices into unoriented parallel classes."""
    items = []
    for i, h in enumerate(hits):
        u = _canonical_direction(_unit(h.holonomy))
        items.append((math.atan2(u.imag, u.real), u, i))
    items.sort(key=lambda t: t[0])
    families: list[list[int]] = []
    reps: list[complex] = []
    for _, u, i in items:
        if families and abs(geom.cross(reps[-1], u)) < PARALLEL_TOL \
                and geom.dot(reps[-1], u) > 0.0:
            families[-1].append(i)
        else:
            families.append([i])
            reps.append(u)
    # directions just below pi wrap around to angle ~0 with opposite sign
    if len(families) > 1 and abs(geom.cross(reps[0], reps[-1])) < PARALLEL_TOL:
        families[0].extend(families.pop())
        reps.pop()
    return families


def _sigma_inv(surface, e: int) -> int:
    """Rotate a corner clockwise about its start vertex."""
    return nxt(surface.opp[e])


def _continue_left_pi(surface, target_corner: int, w: complex):
    """Outgoing prong reached by passing the vertex with angle pi on the left.

    w is the unit direction of arrival.  Returns (corner, direction).
    """
    theta_in = geom.angle_between(surface.vec[target_corner], -w)
    if theta_in < -1e-9:
        raise FlatstrataError("arrival direction outside its corner sector")
    budget = math.pi - max(theta_in, 0.0)
    c = target_corner
    while True:
        c = _sigma_inv(surface, c)
        a = surface.corner_angle(c)
        if budget <= a + 1e-9:
            offset = max(a - budget, 0.0)
            return c, surface.vec[c] * cmath.exp(1j * offset) / abs(surface.vec[c])
        budget -= a


def _edge_param(surface, h: int, pt: complex) -> float:
    """Position of a point along half-edge h, from its start, in [0,1]."""
    return ((pt - surface.corner_position(h)) / surface.vec[h]).real


def _segments_in_triangles(surface, hit) -> list[tuple[int, complex, complex]]:
    """The polyline of a connection as (triangle, a, b) pieces.

    Direct edge connections return [] here; they are handled as edge
    slots by the probe (crossing an edge is a walker event, not a
    segment intersection).
    """
    if not hit.crossings:
        return []
    pieces = []
    src_tri = hit.source_corner // 3
    first_h, first_pt = hit.crossings[0]
    e = surface.opp[first_h]
    u = _edge_param(surface, first_h, first_pt)
    pt_in_src = surface.corner_position(e) + (1.0 - u) * surface.vec[e]
    pieces.append((src_tri, surface.corner_position(hit.source_corner), pt_in_src))
    for k in range(len(hit.crossings) - 1):
        h, pt = hit.crossings[k]
        h2, pt2 = hit.crossings[k + 1]
        e2 = surface.opp[h2]  # lives in triangle h//3
        u2 = _edge_param(surface, h2, pt2)
        exit_pt = surface.corner_position(e2) + (1.0 - u2) * surface.vec[e2]
        pieces.append((h // 3, pt, exit_pt))
    last_h, last_pt = hit.crossings[-1]
    pieces.append((last_h // 3, last_pt, surface.corner_position(hit.target_corner)))
    return pieces


_PROBE_OFFSETS = (0.5, 0.3819660112501051, 0.6180339887498949,
                  0.2718281828459045, 0.7182818284590452)


def _probe_chain(surface, hits, chain, seg_by_tri, edge_slots, length_budget):
    """Perpendicular probe from a chain member into the cylinder.

    Returns (height, crossed_hit_index, crossing_param_info).  Retries a
    few base points when the probe line grazes a vertex or a segment
    endpoint.
    """
    base = hits[chain[0]]
    w = _unit(base.holonomy)
    n = 1j * w
    if base.crossings:
        h_last, pt_last = base.crossings[-1]
        tri = h_last // 3
        seg_a, seg_b = pt_last, surface.corner_position(base.target_corner)
    else:
        c = base.source_corner
        tri = c // 3
        seg_a = surface.corner_position(c)
        seg_b = seg_a + surface.vec[c]
    scale = math.sqrt(surface.area)
    for offset in _PROBE_OFFSETS:
        start = seg_a + offset * (seg_b - seg_a)
        try:
            steps = tracer.walk(surface, tri, start, n * length_budget)
            grazed = False
        except tracer.WalkHitVertex as exc:
            steps = exc.steps
            grazed = True
        crossing = _scan_probe(surface, steps, seg_by_tri, edge_slots, scale)
        if crossing is None:
            if grazed:
                continue  # vertex on the probe line: move the base point
            raise FlatstrataError("cylinder probe found no opposite boundary")
        dist, idx, clean = crossing
        if not clean:
            continue
        return dist, idx
    raise FlatstrataError("cylinder probe kept grazing vertices")


def _scan_probe(surface, steps, seg_by_tri, edge_slots, scale):
    """First family crossing along the walked probe, or None.

    Returns (distance, hit index, clean) where clean=False flags a
    crossing too close to a segment endpoint to trust.
    """
    dist_so_far = 0.0
    for step in steps:
        d = step.exit - step.entry
        step_len = abs(d)
        best = None
        for idx, a, b in seg_by_tri.get(step.triangle, ()):
            params = geom.seg_intersection_params(step.entry, d, a, b - a)
            if params is None:
                continue
            t, u = params
            if not (-1e-9 < u < 1.0 + 1e-9):
                continue
            if t <= 0.0 or t > 1.0 + 1e-9:
                continue
            total = dist_so_far + t * step_len
            if total <= 1e-9 * scale:
                continue  # the base point itself sits on the chain
            clean = 1e-7 < u < 1.0 - 1e-7
            if best is None or total < best[0]:
                best = (total, idx, clean)
        if step.exit_edge in edge_slots:
            total = dist_so_far + step_len
            if total > 1e-9 * scale:
                u = step.exit_param
                clean = 1e-7 < u < 1.0 - 1e-7
                cand = (total, edge_slots[step.exit_edge], clean)
                if best is None or cand[0] < best[0]:
                    best = cand
        if best is not None:
            return best
        dist_so_far += step_len
    return None


def _chain_key(hits, chain):
    ids = [
        (hits[i].source_corner,
         round(hits[i].holonomy.real, 9), round(hits[i].holonomy.imag, 9))
        for i in chain
    ]
    k = min(range(len(ids)), key=lambda r: ids[r:] + ids[:r])
    return tuple(ids[k:] + ids[:k])


def cylinders(surface: TranslationSurface, delta: float, area_min: float = 0.0,
              budget: int = tracer.DEFAULT_BUDGET) -> tuple[Cylinder, ...]:
    """Maximal cylinders with circumference <= delta and area fraction >= area_min."""
    if not 0.0 <= area_min < 1.0:
        raise ValueError("area_min must lie in [0, 1)")
    hits = _oriented_hits(surface, delta, budget)
    total_area = surface.area
    rev_index = {}
    for i, h in enumerate(hits):
        rev_index[(h.source_corner,
                   round(h.holonomy.real, 9), round(h.holonomy.imag, 9))] = i

    out = []
    seen_pairs = set()
    for family in _direction_families(hits):
        by_corner: dict[int, list[int]] = {}
        for i in family:
            by_corner.setdefault(hits[i].source_corner, []).append(i)

        def successor(i: int):
            h = hits[i]
            w = _unit(h.holonomy)
            c_out, d_out = _continue_left_pi(surface, h.target_corner, w)
            matches = [
                j for j in by_corner.get(c_out, ())
                if abs(geom.cross(d_out, _unit(hits[j].holonomy))) < PARALLEL_TOL
                and geom.dot(d_out, _unit(hits[j].holonomy)) > 0.0
                and geom.dot(w, _unit(hits[j].holonomy)) > 0.0
            ]
            if len(matches) > 1:
                raise FlatstrataError("ambiguous boundary continuation")
            return matches[0] if matches else None

        # cycles of the successor map with total length <= delta
        chain_of: dict[int, tuple] = {}
        chains = []
        visited: dict[int, int] = {}  # hit index -> chain slot or -1 (dead end)
        for i0 in family:
            if i0 in visited:
                continue
            path = [i0]
            pos = {i0: 0}
            while True:
                j = successor(path[-1])
                if j is None:
                    for p in path:
                        visited[p] = -1
                    break
                if j in pos:
                    cycle = tuple(path[pos[j]:])
                    total = sum(abs(hits[k].holonomy) for k in cycle)
                    slot = -1
                    if total <= delta * (1.0 + LENGTH_TOL):
                        slot = len(chains)
                        chains.append(cycle)
                        for k in cycle:
                            chain_of[k] = cycle
                    for p in path:
                        visited[p] = visited.get(p, slot if p in cycle else -1)
                    break
                if j in visited:
                    for p in path:
                        visited[p] = -1
                    break
                path.append(j)
                pos[j] = len(path) - 1

        if not chains:
            continue

        # polyline segments of the family, one entry per geometric segment
        seg_by_tri: dict[int, list] = {}
        edge_slots: dict[int, int] = {}
        listed = set()
        for i in family:
            h = hits[i]
            rk = (h.target_corner,
                  round(-h.holonomy.real, 9), round(-h.holonomy.imag, 9))
            if rk in listed:
                continue
            listed.add((h.source_corner,
                        round(h.holonomy.real, 9), round(h.holonomy.imag, 9)))
            if h.crossings:
                for tri, a, b in _segments_in_triangles(surface, h):
                    seg_by_tri.setdefault(tri, []).append((i, a, b))
            else:
                c = h.source_corner
                edge_slots[c] = i
                edge_slots[surface.opp[c]] = i

        for chain in chains:
            circ = sum(abs(hits[k].holonomy) for k in chain)
            height, crossed = _probe_chain(
                surface, hits, chain, seg_by_tri, edge_slots,
                total_area / circ * (1.0 + 1e-6) + 1e-12,
            )
            ch = hits[crossed]
            w = _unit(hits[chain[0]].holonomy)
            # partner boundary runs against w (cylinder on its own left)
            if geom.dot(_unit(ch.holonomy), w) > 0.0:
                pk = (ch.target_corner,
                      round(-ch.holonomy.real, 9), round(-ch.holonomy.imag, 9))
                partner_i = rev_index[pk]
            else:
                partner_i = crossed
            partner = chain_of.get(partner_i)
            if partner is None:
                raise FlatstrataError("cylinder probe crossed an unchained segment")
            key = frozenset((_chain_key(hits, chain), _chain_key(hits, partner)))
            if key in seen_pairs:
                continue
            seen_pairs.add(key)
            circ2 = sum(abs(hits[k].holonomy) for k in partner)
            if abs(circ2 - circ) > 1e-6 * circ:
                raise FlatstrataError("boundary components disagree on circumference")
            area = circ * height
            frac = area / total_area
            if frac < area_min - 1e-12:
                continue
            boundary = tuple(
                tuple(
                    SaddleConnection(hits[k].source_corner, hits[k].target_corner,
                                     hits[k].holonomy, hits[k].crossings)
                    for k in comp
                )
                for comp in (chain, partner)
            )
            out.append(Cylinder(
                direction=_canonical_direction(w),
                circumference=circ,
                height=height,
                area=area,
                area_fraction=frac,
                boundary=boundary,
            ))
    out.sort(key=lambda c: (c.circumference, math.atan2(c.direction.imag,
                                                        c.direction.real)))
    return tuple(out)


def n_cyl(surface: TranslationSurface, delta: float, area_min: float = 0.0,
          budget: int = tracer.DEFAULT_BUDGET) -> int:
    return len(cylinders(surface, delta, area_min, budget=budget))


# ------------------------------------------------- disks and regions


@dataclass(frozen=True)
class EmbeddedDisk:
    triangle: int
    center: complex  # canonical frame of triangle
    radius: float
    surface: object = None  # the (retriangulated) surface the indices refer to


def _interior_point(surface, tri: int, p: complex) -> complex:
    """Nudge a point on the boundary of its triangle strictly inside."""
    pts = [surface.corner_position(3 * tri + k) for k in range(3)]
    centroid = sum(pts) / 3.0
    return p + (centroid - p) * 1e-9


def _lens_meets_triangle(o1: complex, o2: complex, r: float, pts) -> bool:
    """Does {x : |x+o1|<r and |x+o2|<r} meet the closed triangle pts?"""
    c1, c2 = -o1, -o2
    d = abs(c2 - c1)
    if d >= 2.0 * r:
        return False
    mid = 0.5 * (c1 + c2)
    if geom.point_in_triangle(mid, *pts, 1e-12):
        return True
    for v in pts:
        if max(abs(v - c1), abs(v - c2)) < r:
            return True
    # lens corners (circle intersection points)
    if d > 1e-300:
        half = math.sqrt(max(r * r - 0.25 * d * d, 0.0))
        axis = (c2 - c1) / d
        for sgn in (1.0, -1.0):
            corner = mid + sgn * half * 1j * axis
            if geom.point_in_triangle(corner, *pts, 1e-12):
                return True
    # a side meeting both disks on a common sub-interval
    for k in range(3):
        a, b = pts[k], pts[(k + 1) % 3]
        iv = None
        ok = True
        for c in (c1, c2):
            seg = _segment_disk_interval(a, b, c, r)
            if seg is None:
                ok = False
                break
            iv = seg if iv is None else (max(iv[0], seg[0]), min(iv[1], seg[1]))
        if ok and iv is not None and iv[0] < iv[1]:
            return True
    return False


def _segment_disk_interval(a, b, c, r):
    """Parameter interval of [a,b] inside the open disk (c, r), or None."""
    d = b - a
    dd = geom.dot(d, d)
    if dd == 0.0:
        return (0.0, 1.0) if abs(a - c) < r else None
    f = a - c
    q = geom.dot(f, d) / dd
    disc = q * q - (geom.dot(f, f) - r * r) / dd
    if disc <= 0.0:
        return None
    root = math.sqrt(disc)
    lo, hi = max(-q - root, 0.0), min(-q + root, 1.0)
    if lo >= hi:
        return None
    return lo, hi


def disk_is_embedded(surface: TranslationSurface, tri: int, center: complex,
                     radius: float) -> bool:
    """Whether the open metric disk embeds (injective, no vertex inside)."""
    center = _interior_point(surface, tri, center)
    sheets = tracer.develop_within(surface, tri, center, radius)
    by_tri: dict[int, list[complex]] = {}
    for sh in sheets:
        by_tri.setdefault(sh.triangle, []).append(sh.offset)
        for k in range(3):
            v = surface.corner_position(3 * sh.triangle + k) + sh.offset
            if abs(v) < radius * (1.0 - 1e-9):
                return False
    for t, offsets in by_tri.items():
        pts = [surface.corner_position(3 * t + k) for k in range(3)]
        for i in range(len(offsets)):
            for j in range(i + 1, len(offsets)):
                if _lens_meets_triangle(offsets[i], offsets[j], radius, pts):
                    return False
    return True


def deepest_point(surface: TranslationSurface):
    """Point realizing the covering radius: (triangle, local point, crad).

    The point is the circumcenter of the widest Delaunay triangle of a
    retriangulated copy; it is located on the *input* surface by walking
    from a matching triangle, so the returned triangle index belongs to
    the input surface only when the input is already Delaunay.
    """
    dela, cert = delaunayize(surface)
    t = cert.witness_triangle
    pts = [dela.corner_position(3 * t + k) for k in range(3)]
    cc = geom.circumcenter(*pts)
    centroid = sum(pts) / 3.0
    tri, p = tracer.locate(dela, t, centroid, cc - centroid)
    return dela, tri, p, cert.max_circumradius


def dichotomy_witness(surface: TranslationSurface):
    """A certified EmbeddedDisk or Cylinder at the covering-radius scale.

    Either the disk of radius crad/2 about the deepest point embeds, or
    some cylinder has circumference <= crad and height >= crad; both
    facts are re-measured before returning.  Requires unit area.
    """
    if abs(surface.area - 1.0) > 1e-6:
        raise ValueError("dichotomy witness is defined for unit-area surfaces")
    dela, tri, p, crad = deepest_point(surface)
    if disk_is_embedded(dela, tri, p, 0.5 * crad):
        return EmbeddedDisk(triangle=tri, center=p, radius=0.5 * crad,
                            surface=dela)
    cands = [
        c for c in cylinders(dela, crad * (1.0 + LENGTH_TOL))
        if c.height >= crad * (1.0 - LENGTH_TOL)
    ]
    if not cands:
        raise FlatstrataError(
            "no witness found: disk overlaps but no qualifying cylinder"
        )
    cands.sort(key=lambda c: (-c.height, c.direction.real, c.direction.imag))
    return cands[0]


@dataclass(frozen=True)
class RegionLabel:
    primary: str
    labels: tuple
    witness: object
    crad: float


def default_thresholds(genus: int) -> tuple[float, float, float]:
    if genus < 1:
        raise ValueError("genus must be at least 1")
    t1 = 18.0 * math.sqrt(math.log(genus) / genus) if genus > 1 else 0.0
    return (t1, 1.0 / math.sqrt(genus), 1.0 / genus)


def classify_region(surface: TranslationSurface, thresholds=None) -> RegionLabel:
    """Sort a unit-area surface into its diameter/cylinder/disk regions.

    thresholds = (small_diam_bound, cyl_crad_min, cyl_area_split); the
    defaults depend only on the genus.  All applicable labels are
    reported; the primary one follows the precedence
    SmallDiam > RichDisk > RichCyl > PoorCyl.
    """
    if abs(surface.area - 1.0) > 1e-6:
        raise ValueError("region classification expects a unit-area surface")
    if thresholds is None:
        thresholds = default_thresholds(surface.stratum.genus)
    t1, t2, t3 = thresholds
    dela, tri, p, crad = deepest_point(surface)

    labels = []
    witnesses = {}
    if crad < t1:
        labels.append("SmallDiam")
        witnesses["SmallDiam"] = EmbeddedDisk(triangle=tri, center=p,
                                              radius=crad, surface=dela)
    if crad >= t1 and disk_is_embedded(dela, tri, p, 0.5 * crad):
        labels.append("RichDisk")
        witnesses["RichDisk"] = EmbeddedDisk(triangle=tri, center=p,
                                             radius=0.5 * crad, surface=dela)
    if crad >= t2:
        delta = surface.area / crad * (1.0 + LENGTH_TOL)
        cands = [
            c for c in cylinders(dela, delta)
            if c.height >= crad * (1.0 - LENGTH_TOL)
        ]
        if cands:
            cands.sort(key=lambda c: (-c.height, c.direction.real,
                                      c.direction.imag))
            cyl = cands[0]
            if cyl.area <= t3 * (1.0 + LENGTH_TOL):
                labels.append("PoorCyl")
                witnesses["PoorCyl"] = cyl
            if cyl.area >= t3 * (1.0 - LENGTH_TOL):
                labels.append("RichCyl")
                witnesses["RichCyl"] = cyl
    order = ("SmallDiam", "RichDisk", "RichCyl", "PoorCyl")
    ranked = tuple(sorted(labels, key=order.index))
    if not ranked:
        raise FlatstrataError(
            "surface matches no region with the given thresholds"
        )
    return RegionLabel(primary=ranked[0], labels=ranked,
                       witness=witnesses[ranked[0]], crad=crad)
