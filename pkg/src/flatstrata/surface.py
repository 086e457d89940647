"""Triangulated translation surfaces with a half-edge kernel.

Layout convention: half-edges come in triples, so (3t, 3t+1, 3t+2) are the
sides of triangle t in counterclockwise order and triangles carry no storage
of their own.  nxt/prv never leave a triple.  Each half-edge stores the
complex vector of its side; opposite half-edges carry negated vectors.
Rotating counterclockwise about the start vertex of e is opp[prv(e)].

Marked flags live on half-edges (the flag of the start vertex), so vertex
identity never needs to be stored; vertices are recovered as corner orbits.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Sequence

from . import geom
from .errors import (
    EmptyStratum,
    FlatstrataError,
    InvalidSurface,
    NonMatchingSides,
    NotTransitive,
    ParseError,
    SelfIntersectingPolygon,
    ZeroAreaSurface,
)
from .stratum import StratumSignature, stratum_from_orders

TWO_PI = 2.0 * math.pi

# cone angles must sit within this of a multiple of 2*pi
ANGLE_TOL = 1e-9
# relative tolerance for vector identities (closure, opposite negation)
REL_TOL = 1e-9
# a regular vertex is one whose angle is within this of 2*pi
FLAT_TOL = 1e-6


def nxt(e: int) -> int:
    return e + 1 if e % 3 < 2 else e - 2


def prv(e: int) -> int:
    return e - 1 if e % 3 else e + 2


def _orbit(opp: Sequence[int], e0: int) -> list[int]:
    """Corner half-edges sharing the start vertex of e0, counterclockwise."""
    out = [e0]
    e = opp[prv(e0)]
    while e != e0:
        out.append(e)
        e = opp[prv(e)]
    return out


@dataclass(frozen=True)
class Vertex:
    corners: tuple[int, ...]  # outgoing half-edges, counterclockwise order
    angle: float
    order: int  # angle = 2*pi*(order + 1)
    marked: bool


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        return "valid" if self.ok else "; ".join(self.violations)


class TranslationSurface:
    """Immutable triangulated translation surface."""

    __slots__ = ("opp", "vec", "marked", "stratum", "_area", "_vertices", "_vertex_of")

    def __init__(self, opp, vec, marked, stratum: StratumSignature):
        self.opp = tuple(opp)
        self.vec = tuple(vec)
        self.marked = tuple(marked)
        self.stratum = stratum
        n = len(self.opp)
        if n == 0 or n % 3 or len(self.vec) != n or len(self.marked) != n:
            raise ValueError("half-edge arrays must align in multiples of 3")
        self._area = None
        self._vertices = None
        self._vertex_of = None

    def __repr__(self):
        return (
            f"<TranslationSurface H{self.stratum} "
            f"triangles={self.n_triangles} area={self.area:.6g}>"
        )

    # ------------------------------------------------------------ basics

    @property
    def n_half_edges(self) -> int:
        return len(self.opp)

    @property
    def n_triangles(self) -> int:
        return len(self.opp) // 3

    @property
    def area(self) -> float:
        if self._area is None:
            total = 0.0
            for t in range(self.n_triangles):
                total += geom.triangle_area(self.vec[3 * t], self.vec[3 * t + 1])
            self._area = total
        return self._area

    def corner_angle(self, e: int) -> float:
        """Interior angle at the start vertex of e, inside e's triangle."""
        return geom.angle_between(self.vec[e], -self.vec[prv(e)])

    def corner_position(self, e: int) -> complex:
        """Position of start(e) in the canonical frame of e's triangle.

        The frame places corner 3t at the origin with sides laid out by
        their stored vectors.
        """
        k = e % 3
        if k == 0:
            return 0j
        t = e - k
        if k == 1:
            return self.vec[t]
        return self.vec[t] + self.vec[t + 1]

    # ---------------------------------------------------------- vertices

    def _compute_vertices(self):
        n = len(self.opp)
        vertex_of = [-1] * n
        verts = []
        for e0 in range(n):
            if vertex_of[e0] >= 0:
                continue
            corners = _orbit(self.opp, e0)
            angle = math.fsum(self.corner_angle(c) for c in corners)
            idx = len(verts)
            for c in corners:
                vertex_of[c] = idx
            verts.append(
                Vertex(
                    corners=tuple(corners),
                    angle=angle,
                    order=round(angle / TWO_PI) - 1,
                    marked=self.marked[e0],
                )
            )
        self._vertices = tuple(verts)
        self._vertex_of = tuple(vertex_of)

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        if self._vertices is None:
            self._compute_vertices()
        return self._vertices

    def vertex_index(self, e: int) -> int:
        """Index into .vertices of the start vertex of half-edge e."""
        if self._vertex_of is None:
            self._compute_vertices()
        return self._vertex_of[e]

    def singular_vertices(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.vertices) if v.order > 0)

    # -------------------------------------------------------- validation

    def validate(self) -> ValidationReport:
        bad = []
        n = len(self.opp)
        opp, vec = self.opp, self.vec
        scale = max(abs(z) for z in vec)
        if scale == 0.0:
            return ValidationReport(("all edge vectors vanish",))
        tol = REL_TOL * scale
        for e in range(n):
            o = opp[e]
            if not 0 <= o < n or o == e or opp[o] != e:
                bad.append(f"half-edge {e}: opposite pairing broken")
            elif e < o and abs(vec[e] + vec[o]) > tol:
                bad.append(f"half-edge {e}: opposite vectors do not negate")
        area_total = 0.0
        area_floor = None
        areas = []
        for t in range(self.n_triangles):
            u, v, w = vec[3 * t], vec[3 * t + 1], vec[3 * t + 2]
            if abs(u + v + w) > tol:
                bad.append(f"triangle {t}: sides do not close")
            a = geom.triangle_area(u, v)
            areas.append(a)
            area_total += a
        area_floor = 1e-14 * abs(area_total)
        for t, a in enumerate(areas):
            if a <= area_floor:
                bad.append(f"triangle {t}: degenerate or negative area {a:.3e}")
        if area_total <= 0.0:
            bad.append("total area is not positive")
        if bad:
            # orbit walks are unsafe once the pairing is broken
            return ValidationReport(tuple(bad))

        seen = [False] * self.n_triangles
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            t = stack.pop()
            for k in range(3):
                t2 = opp[3 * t + k] // 3
                if not seen[t2]:
                    seen[t2] = True
                    count += 1
                    stack.append(t2)
        if count != self.n_triangles:
            bad.append("surface is disconnected")

        orders = []
        for i, v in enumerate(self.vertices):
            k = round(v.angle / TWO_PI) - 1
            if k < 0 or abs(v.angle - TWO_PI * (k + 1)) > ANGLE_TOL * (k + 1):
                bad.append(
                    f"vertex {i}: cone angle {v.angle!r} is not a multiple of 2*pi"
                )
                continue
            flags = {self.marked[c] for c in v.corners}
            if len(flags) > 1:
                bad.append(f"vertex {i}: inconsistent marked flags")
            if k == 0 and not v.marked:
                bad.append(f"vertex {i}: flat vertex is not a marked point")
            if k > 0 and v.marked:
                bad.append(f"vertex {i}: cone point carries a marked flag")
            orders.append(k)
        if tuple(sorted(orders, reverse=True)) != self.stratum.orders:
            bad.append(
                f"vertex orders {sorted(orders, reverse=True)} "
                f"do not match stratum {self.stratum}"
            )
        n_v = len(self.vertices)
        chi = n_v - n // 2 + n // 3  # V - E + F
        if chi % 2 or (2 - chi) // 2 != self.stratum.genus:
            bad.append("Euler characteristic disagrees with stratum genus")
        return ValidationReport(tuple(bad))

    # ----------------------------------------------------------- scaling

    def rescale(self, lam: float) -> "TranslationSurface":
        """Scale area by lam (every vector by sqrt(lam))."""
        if not lam > 0:
            raise ValueError("area factor must be positive")
        f = math.sqrt(lam)
        return TranslationSurface(
            self.opp, [z * f for z in self.vec], self.marked, self.stratum
        )

    def normalize_area(self) -> "TranslationSurface":
        a = self.area
        if not a > 0:
            raise ZeroAreaSurface("cannot normalize a surface of vanishing area")
        return self.rescale(1.0 / a)

    # ----------------------------------------------------- serialization

    def serialize(self) -> str:
        lines = [
            "TSF1",
            "stratum " + ",".join(str(k) for k in self.stratum.orders),
            f"halfedges {len(self.opp)}",
        ]
        for e in range(len(self.opp)):
            z = self.vec[e]
            lines.append(f"{e} {self.opp[e]} {nxt(e)} {z.real:.17g} {z.imag:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str, check: bool = True) -> "TranslationSurface":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0] != "TSF1":
            raise ParseError("line 1: expected header 'TSF1'")
        if len(lines) < 3:
            raise ParseError("file truncated before the half-edge table")
        parts = lines[1].split()
        if len(parts) != 2 or parts[0] != "stratum":
            raise ParseError("line 2: expected 'stratum k1,k2,...'")
        try:
            orders = tuple(int(tok) for tok in parts[1].split(","))
        except ValueError as exc:
            raise ParseError(f"line 2: bad order list {parts[1]!r}") from exc
        parts = lines[2].split()
        if len(parts) != 2 or parts[0] != "halfedges":
            raise ParseError("line 3: expected 'halfedges N'")
        try:
            n = int(parts[1])
        except ValueError as exc:
            raise ParseError(f"line 3: bad count {parts[1]!r}") from exc
        if n <= 0 or n % 3:
            raise ParseError(f"line 3: {n} half-edges is not a positive multiple of 3")
        if len(lines) != 3 + n:
            raise ParseError(f"expected {n} half-edge lines, found {len(lines) - 3}")

        opp_raw = [-1] * n
        nxt_raw = [-1] * n
        vec_raw = [0j] * n
        for lineno, ln in enumerate(lines[3:], start=4):
            fields = ln.split()
            if len(fields) != 5:
                raise ParseError(f"line {lineno}: expected 5 fields, got {len(fields)}")
            try:
                e = int(fields[0])
                o = int(fields[1])
                nx = int(fields[2])
                re = float(fields[3])
                im = float(fields[4])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: unparsable field") from exc
            if not 0 <= e < n:
                raise ParseError(f"line {lineno}: half-edge id {e} out of range")
            if opp_raw[e] != -1:
                raise ParseError(f"line {lineno}: half-edge id {e} repeated")
            if not 0 <= o < n or not 0 <= nx < n:
                raise ParseError(f"line {lineno}: opp/next reference out of range")
            opp_raw[e] = o
            nxt_raw[e] = nx
            vec_raw[e] = complex(re, im)
        for e in range(n):
            if opp_raw[e] == e or opp_raw[opp_raw[e]] != e:
                raise ParseError(f"half-edge {e}: opp is not a free involution")

        # regroup next-cycles of length 3 into the triple layout
        remap = [-1] * n
        assigned = 0
        for e in range(n):
            if remap[e] >= 0:
                continue
            c1 = nxt_raw[e]
            c2 = nxt_raw[c1]
            if len({e, c1, c2}) != 3 or nxt_raw[c2] != e:
                raise ParseError(f"half-edge {e}: next map is not a 3-cycle")
            for k, s in enumerate((e, c1, c2)):
                remap[s] = assigned + k
            assigned += 3
        opp2 = [0] * n
        vec2 = [0j] * n
        for e in range(n):
            opp2[remap[e]] = remap[opp_raw[e]]
            vec2[remap[e]] = vec_raw[e]

        try:
            stratum = stratum_from_orders(orders, allow_marked_points=(0 in orders))
        except FlatstrataError as exc:
            raise ParseError(f"line 2: {exc}") from exc

        marked = [False] * n
        if 0 in orders:
            done = [False] * n
            for e0 in range(n):
                if done[e0]:
                    continue
                corners = _orbit(opp2, e0)
                for c in corners:
                    done[c] = True
                angle = math.fsum(
                    geom.angle_between(vec2[c], -vec2[prv(c)]) for c in corners
                )
                if abs(angle - TWO_PI) < FLAT_TOL:
                    for c in corners:
                        marked[c] = True

        srf = cls(opp2, vec2, marked, stratum)
        if check:
            report = srf.validate()
            if not report.ok:
                raise InvalidSurface(report)
        return srf

    # ------------------------------------------------------------ editing

    def mutable(self) -> "MutableSurface":
        return MutableSurface(list(self.opp), list(self.vec), list(self.marked))


# ======================================================================
# mutable scratch surface used by flips, vertex removal and surgery

SplitEdge = namedtuple(
    "SplitEdge",
    "a_to_p p_to_b b_to_p p_to_a p_to_c1 c1_to_p p_to_c2 c2_to_p",
)

SplitTriangle = namedtuple(
    "SplitTriangle",
    "a_to_p b_to_p c_to_p p_to_a p_to_b p_to_c",
)


class MutableSurface:
    """Scratch copy for local rewrites.  Invariants hold only at finalize.

    Local operations (flip, splits, vertex removal) keep the implicit
    triple layout intact at every step; whole triangles scheduled for
    removal sit in `dead` until compact() drops them.
    """

    def __init__(self, opp, vec, marked):
        self.opp = list(opp)
        self.vec = list(vec)
        self.marked = list(marked)
        self.dead: set[int] = set()

    # ---------------------------------------------------------- queries

    def sigma(self, e: int) -> int:
        """Next outgoing half-edge counterclockwise about start(e)."""
        return self.opp[prv(e)]

    def orbit(self, e: int) -> list[int]:
        return _orbit(self.opp, e)

    def corner_angle(self, e: int) -> float:
        return geom.angle_between(self.vec[e], -self.vec[prv(e)])

    def orbit_angle(self, corners) -> float:
        return math.fsum(self.corner_angle(c) for c in corners)

    def live_triangles(self):
        return (t for t in range(len(self.opp) // 3) if t not in self.dead)

    def live_edges(self):
        for t in self.live_triangles():
            yield 3 * t
            yield 3 * t + 1
            yield 3 * t + 2

    def pair(self, e: int, f: int):
        self.opp[e] = f
        self.opp[f] = e

    # ------------------------------------------------------------- flip

    def flip_gain(self, e: int) -> float:
        """Min signed area of the two triangles a flip of e would create."""
        o = self.opp[e]
        b, c = prv(e), nxt(o)
        a, d = nxt(e), prv(o)
        g = self.vec[b] + self.vec[c]
        return min(
            geom.triangle_area(g, self.vec[d]),
            geom.triangle_area(-g, self.vec[b]),
        )

    def flip_edge(self, e: int):
        """Replace edge e by the other diagonal of its quadrilateral.

        Contents of the four outer slots rotate (a->b->c->d->a) so that the
        triple layout survives; external opposite pointers are patched.
        """
        o = self.opp[e]
        a, b = nxt(e), prv(e)
        c, d = nxt(o), prv(o)
        va, vb, vc, vd = self.vec[a], self.vec[b], self.vec[c], self.vec[d]
        pa, pb, pc, pd = self.opp[a], self.opp[b], self.opp[c], self.opp[d]
        ma, mb, mc, md = self.marked[a], self.marked[b], self.marked[c], self.marked[d]
        g = vb + vc
        if geom.triangle_area(g, vd) <= 0.0 or geom.triangle_area(-g, vb) <= 0.0:
            raise ValueError(f"flip of edge {e} would create a non-positive triangle")
        self.vec[e], self.marked[e] = g, mb
        self.vec[o], self.marked[o] = -g, md
        moved = {a: b, b: c, c: d, d: a}
        for src, vv, mm in ((a, va, ma), (b, vb, mb), (c, vc, mc), (d, vd, md)):
            dst = moved[src]
            self.vec[dst] = vv
            self.marked[dst] = mm
        for src, p in ((a, pa), (b, pb), (c, pc), (d, pd)):
            dst = moved[src]
            self.opp[dst] = moved.get(p, p)
            if p not in moved:
                self.opp[p] = dst

    # ------------------------------------------------------------ splits

    def split_edge(self, e: int, t: float) -> SplitEdge:
        """Split edge e at parameter t in (0,1), measured from start(e).

        Introduces an unmarked flat vertex P of degree 4.  C1 and C2 are
        the far corners of the two triangles adjacent to e.
        """
        if not 0.0 < t < 1.0:
            raise ValueError(f"split parameter {t} outside (0,1)")
        o = self.opp[e]
        a, b = nxt(e), prv(e)
        c, d = nxt(o), prv(o)
        ve, vo = self.vec[e], self.vec[o]
        va, vc = self.vec[a], self.vec[c]
        pa, pc = self.opp[a], self.opp[c]
        ma, mb = self.marked[a], self.marked[b]
        mc, md = self.marked[c], self.marked[d]
        h = len(self.opp)
        n0, n1, n2 = h, h + 1, h + 2
        m0, m1, m2 = h + 3, h + 4, h + 5
        u = (1.0 - t) * ve + va  # P -> C1
        w = t * vo + vc  # P -> C2
        self.vec[e] = t * ve
        self.vec[a] = u
        self.vec[o] = (1.0 - t) * vo
        self.vec[c] = w
        self.vec.extend([(1.0 - t) * ve, va, -u, t * vo, vc, -w])
        self.marked[a] = False
        self.marked[c] = False
        self.marked.extend([False, ma, mb, False, mc, md])
        self.opp.extend([-1] * 6)
        self.pair(e, m0)
        self.pair(n0, o)
        self.pair(a, n2)
        self.pair(c, m2)
        moved = {a: n1, c: m1}
        for src, p in ((a, pa), (c, pc)):
            dst = moved[src]
            self.opp[dst] = moved.get(p, p)
            if p not in moved:
                self.opp[p] = dst
        return SplitEdge(e, n0, o, m0, a, n2, c, m2)

    def split_triangle(self, tri: int, p: complex) -> SplitTriangle:
        """Insert an unmarked vertex at p (canonical frame of triangle tri)."""
        e0, e1, e2 = 3 * tri, 3 * tri + 1, 3 * tri + 2
        v0, v1, v2 = self.vec[e0], self.vec[e1], self.vec[e2]
        p1, p2 = self.opp[e1], self.opp[e2]
        m0, m1, m2 = self.marked[e0], self.marked[e1], self.marked[e2]
        w1 = p - v0  # B -> P
        w2 = p - (v0 + v1)  # C -> P
        if (
            geom.triangle_area(v0, w1) <= 0.0
            or geom.triangle_area(v1, w2) <= 0.0
            or geom.triangle_area(v2, p) <= 0.0
        ):
            raise ValueError("split point is not strictly inside the triangle")
        h = len(self.opp)
        f0, f1, f2 = h, h + 1, h + 2  # (B->C, C->P, P->B)
        g0, g1, g2 = h + 3, h + 4, h + 5  # (C->A, A->P, P->C)
        self.vec[e1] = w1
        self.vec[e2] = -p
        self.vec.extend([v1, w2, -w1, v2, p, -w2])
        self.marked[e2] = False
        self.marked.extend([m1, m2, False, m2, m0, False])
        self.opp.extend([-1] * 6)
        self.pair(e1, f2)
        self.pair(f1, g2)
        self.pair(g1, e2)
        moved = {e1: f0, e2: g0}
        for src, p_old in ((e1, p1), (e2, p2)):
            dst = moved[src]
            self.opp[dst] = moved.get(p_old, p_old)
            if p_old not in moved:
                self.opp[p_old] = dst
        return SplitTriangle(g1, e1, f1, e2, f2, g2)

    # --------------------------------------------------- vertex removal

    def remove_vertex(self, corner: int):
        """Remove the flat vertex at start(corner) by flips and a 3-1 merge.

        The caller must ensure the vertex is regular (cone angle 2*pi) and
        unmarked; geometry degenerates otherwise and the flips refuse.
        """
        guard = 0
        while True:
            star = self.orbit(corner)
            if len(star) == 3:
                break
            guard += 1
            if guard > 4 * len(self.opp):
                raise FlatstrataError("vertex star did not simplify within budget")
            flipped = False
            for s in sorted(star, key=self.flip_gain, reverse=True):
                if self.flip_gain(s) <= 0.0:
                    break
                o = self.opp[s]
                touched = {s, o, nxt(s), nxt(o)}
                keep = [x for x in star if x not in touched]
                if not keep:
                    continue
                corner = keep[0]
                self.flip_edge(s)
                flipped = True
                break
            if not flipped:
                # a vertex sitting on a straight edge (two collinear spoke
                # pairs) cannot be flipped away; undo the edge split instead
                if len(star) == 4 and self._unsplit_degree4(star):
                    return
                raise FlatstrataError("no legal flip at vertex star")
        k0, k1, k2 = star
        self._merge_degree3(k0, k1, k2)

    def _unsplit_degree4(self, star) -> bool:
        """Merge the four triangles around a vertex on a straight edge.

        star is the ccw corner orbit [s0, s1, s2, s3]; requires one pair of
        opposite spokes to be anti-parallel (the straight edge the vertex
        subdivides).  Returns False when no such pair exists.
        """
        for i in range(2):
            v1 = self.vec[star[(i + 1) % 4]]
            v3 = self.vec[star[(i + 3) % 4]]
            if (
                abs(geom.cross(v1, v3)) <= 1e-12 * abs(v1) * abs(v3)
                and geom.dot(v1, v3) < 0.0
            ):
                s0, s1, s2, s3 = (star[(i + k) % 4] for k in range(4))
                break
        else:
            return False
        # layout: s1 = P->A, s3 = P->B anti-parallel; s0 = P->C1, s2 = P->C2
        e_slot = prv(s0)  # A -> P, becomes A -> B
        o_slot = prv(s2)  # B -> P, becomes B -> A
        if self.opp[s1] != e_slot or self.opp[s3] != o_slot:
            raise FlatstrataError("degree-4 star has unexpected gluing")
        ab = self.vec[e_slot] + self.vec[s3]
        if (
            geom.triangle_area(ab, self.vec[nxt(s3)]) <= 0.0
            or geom.triangle_area(-ab, self.vec[nxt(s1)]) <= 0.0
        ):
            raise FlatstrataError("unsplit would create a non-positive triangle")
        src_a, src_b = nxt(s3), nxt(s1)  # B -> C1 and A -> C2 contents
        moved = {src_a: s0, src_b: s2}
        pa, pb = self.opp[src_a], self.opp[src_b]
        va, vb = self.vec[src_a], self.vec[src_b]
        ma, mb = self.marked[src_a], self.marked[src_b]
        # e_slot/o_slot keep their start vertices (A, B): flags stay put
        self.vec[e_slot] = ab
        self.vec[o_slot] = -ab
        self.pair(e_slot, o_slot)
        for src, vv, mm in ((src_a, va, ma), (src_b, vb, mb)):
            dst = moved[src]
            self.vec[dst] = vv
            self.marked[dst] = mm
        for src, p in ((src_a, pa), (src_b, pb)):
            dst = moved[src]
            self.opp[dst] = moved.get(p, p)
            if p not in moved:
                self.opp[p] = dst
        self.dead.add(s1 // 3)
        self.dead.add(s3 // 3)
        return True

    def _merge_degree3(self, k0, k1, k2):
        a0, b0 = nxt(k0), prv(k0)
        a1, b1 = nxt(k1), prv(k1)
        a2, b2 = nxt(k2), prv(k2)
        if (
            self.opp[b0] != k1
            or self.opp[b1] != k2
            or self.opp[b2] != k0
            or len({k0 // 3, k1 // 3, k2 // 3}) != 3
        ):
            raise FlatstrataError("vertex star is not a simple triangle fan")
        va0, va1, va2 = self.vec[a0], self.vec[a1], self.vec[a2]
        pa0, pa1, pa2 = self.opp[a0], self.opp[a1], self.opp[a2]
        ma0, ma1, ma2 = self.marked[a0], self.marked[a1], self.marked[a2]
        if geom.triangle_area(va0, va1) <= 0.0:
            raise FlatstrataError("merged link triangle would be degenerate")
        moved = {a0: k0, a1: a0, a2: b0}
        for src, vv, mm in ((a0, va0, ma0), (a1, va1, ma1), (a2, va2, ma2)):
            dst = moved[src]
            self.vec[dst] = vv
            self.marked[dst] = mm
        for src, p in ((a0, pa0), (a1, pa1), (a2, pa2)):
            dst = moved[src]
            self.opp[dst] = moved.get(p, p)
            if p not in moved:
                self.opp[p] = dst
        self.dead.add(k1 // 3)
        self.dead.add(k2 // 3)

    # ------------------------------------------------------- compaction

    def compact(self):
        if not self.dead:
            return
        ntri = len(self.opp) // 3
        remap = {}
        new_t = 0
        for t in range(ntri):
            if t in self.dead:
                continue
            for k in range(3):
                remap[3 * t + k] = 3 * new_t + k
            new_t += 1
        opp2, vec2, mk2 = [], [], []
        for t in range(ntri):
            if t in self.dead:
                continue
            for k in range(3):
                e = 3 * t + k
                p = self.opp[e]
                if p not in remap:
                    raise FlatstrataError(
                        f"half-edge {e} is glued to a removed triangle"
                    )
                opp2.append(remap[p])
                vec2.append(self.vec[e])
                mk2.append(self.marked[e])
        self.opp, self.vec, self.marked = opp2, vec2, mk2
        self.dead = set()

    def finalize(self) -> TranslationSurface:
        """Compact, recompute the stratum from cone angles, freeze."""
        self.compact()
        n = len(self.opp)
        if n == 0:
            raise ZeroAreaSurface("no triangles left")
        orders = []
        done = [False] * n
        for e0 in range(n):
            if done[e0]:
                continue
            corners = _orbit(self.opp, e0)
            for c in corners:
                done[c] = True
            angle = self.orbit_angle(corners)
            orders.append(round(angle / TWO_PI) - 1)
        # record whatever vertices exist; validate() flags unmarked flat ones
        stratum = stratum_from_orders(orders, allow_marked_points=(0 in orders))
        return TranslationSurface(self.opp, self.vec, self.marked, stratum)


def settle_marked_points(mut: MutableSurface, allow_marked_points: bool):
    """Resolve flat vertices: mark them all, or remove them one by one.

    Removal preserves the flat metric (flips + merge of the degree-3 star),
    so cone angles elsewhere are untouched.  Raises EmptyStratum when the
    surface has no cone point at all and marking is not allowed.
    """
    while True:
        mut.compact()
        n = len(mut.opp)
        done = [False] * n
        orbits = []
        for e0 in range(n):
            if done[e0]:
                continue
            corners = _orbit(mut.opp, e0)
            for c in corners:
                done[c] = True
            orbits.append(corners)
        flat = [
            corners
            for corners in orbits
            if abs(mut.orbit_angle(corners) - TWO_PI) < FLAT_TOL
            and not any(mut.marked[c] for c in corners)
        ]
        if not flat:
            return
        if allow_marked_points:
            for corners in flat:
                for c in corners:
                    mut.marked[c] = True
            return
        if len(flat) == len(orbits):
            raise EmptyStratum(
                "surface has only flat vertices; "
                "pass allow_marked_points=True to keep them as marked points"
            )
        mut.remove_vertex(flat[0][0])


# ======================================================================
# builders


def _as_perm(p, n: int) -> list[int]:
    """Accept a permutation of 0..n-1 or of 1..n (shifted down)."""
    p = list(p)
    if len(p) != n:
        raise ValueError(f"permutation has length {len(p)}, expected {n}")
    if sorted(p) == list(range(n)):
        return [int(x) for x in p]
    if sorted(p) == list(range(1, n + 1)):
        return [int(x) - 1 for x in p]
    raise ValueError(f"not a permutation of n={n} symbols: {p}")


def build_square_tiled(
    n: int, h, v, allow_marked_points: bool = False
) -> TranslationSurface:
    """Surface from n unit squares: h[s] sits right of s, v[s] above s.

    Each square splits into two triangles along its main diagonal; sides
    are glued by translation.  Area is n (not normalized).  Vertices with
    cone angle 2*pi are removed unless allow_marked_points keeps them.
    """
    if n < 1:
        raise ValueError("need at least one square")
    h = _as_perm(h, n)
    v = _as_perm(v, n)
    seen = {0}
    stack = [0]
    while stack:
        s = stack.pop()
        for img in (h[s], v[s]):
            if img not in seen:
                seen.add(img)
                stack.append(img)
    if len(seen) != n:
        raise NotTransitive(
            f"h and v reach only {len(seen)} of {n} squares from square 0"
        )
    hinv = [0] * n
    vinv = [0] * n
    for s in range(n):
        hinv[h[s]] = s
        vinv[v[s]] = s

    opp = [0] * (6 * n)
    vec = [0j] * (6 * n)
    for s in range(n):
        lo, up = 6 * s, 6 * s + 3
        # lower triangle: bottom, right, falling diagonal
        vec[lo] = 1 + 0j
        vec[lo + 1] = 1j
        vec[lo + 2] = -1 - 1j
        # upper triangle: rising diagonal, top, left
        vec[up] = 1 + 1j
        vec[up + 1] = -1 + 0j
        vec[up + 2] = -1j
        opp[lo + 2] = up
        opp[up] = lo + 2
        opp[lo] = 6 * vinv[s] + 4  # bottom of s = top of the square below
        opp[6 * vinv[s] + 4] = lo
        opp[lo + 1] = 6 * h[s] + 5  # right of s = left of the square right of s
        opp[6 * h[s] + 5] = lo + 1
    mut = MutableSurface(opp, vec, [False] * (6 * n))
    settle_marked_points(mut, allow_marked_points)
    return mut.finalize()


def build_from_polygon(
    vertices, side_pairing, allow_marked_points: bool = False
) -> TranslationSurface:
    """Surface from a simple polygon with sides identified by translation.

    vertices: planar points, counterclockwise (complex or (x, y) pairs).
    side_pairing: pairs (i, j) identifying side i (from vertex i to i+1)
    with side j; each side appears in exactly one pair and paired sides
    must be negatives of each other as vectors.
    """
    pts = [
        complex(p) if isinstance(p, (int, float, complex)) else complex(p[0], p[1])
        for p in vertices
    ]
    m = len(pts)
    if m < 3:
        raise SelfIntersectingPolygon("need at least three vertices")
    signed = geom.polygon_signed_area(pts)
    scale = max(abs(p) for p in pts) or 1.0
    if signed <= 1e-12 * scale * scale:
        raise ZeroAreaSurface(
            "polygon is clockwise or degenerate; supply counterclockwise vertices"
        )
    if not geom.polygon_is_simple(pts):
        raise SelfIntersectingPolygon("polygon boundary crosses itself")
    pairing = [(int(i), int(j)) for i, j in side_pairing]
    used = sorted(k for ij in pairing for k in ij)
    if used != list(range(m)):
        raise ValueError("side pairing must cover every side exactly once")
    side_vec = [pts[(i + 1) % m] - pts[i] for i in range(m)]
    partner = [0] * m
    for i, j in pairing:
        if abs(side_vec[i] + side_vec[j]) > REL_TOL * scale:
            raise NonMatchingSides(
                f"sides {i} and {j} are not translates: "
                f"{side_vec[i]} vs {side_vec[j]}"
            )
        partner[i] = j
        partner[j] = i

    try:
        tris = geom.ear_clip(pts)
    except ValueError as exc:
        raise SelfIntersectingPolygon(f"triangulation failed: {exc}") from exc

    opp = [-1] * (3 * len(tris))
    vec = [0j] * (3 * len(tris))
    slot_of = {}
    for t, (i0, i1, i2) in enumerate(tris):
        for k, (a, b) in enumerate(((i0, i1), (i1, i2), (i2, i0))):
            e = 3 * t + k
            vec[e] = pts[b] - pts[a]
            slot_of[(a, b)] = e
    for (a, b), e in slot_of.items():
        if (b, a) in slot_of:  # interior diagonal
            opp[e] = slot_of[(b, a)]
        else:  # boundary side a -> a+1
            if b != (a + 1) % m:
                raise SelfIntersectingPolygon("triangulation produced a stray edge")
            j = partner[a]
            opp[e] = slot_of[(j, (j + 1) % m)]
    mut = MutableSurface(opp, vec, [False] * len(opp))
    settle_marked_points(mut, allow_marked_points)
    return mut.finalize()
