"""Small planar geometry helpers on complex numbers.

Points and vectors are complex: x + i*y.  All routines are tolerance-aware
but keep exact float arithmetic where the inputs are exact (integer grids).
"""

from __future__ import annotations

import math


def cross(a: complex, b: complex) -> float:
    """Signed area form: positive iff b lies counterclockwise of a."""
    return a.real * b.imag - a.imag * b.real


def dot(a: complex, b: complex) -> float:
    return a.real * b.real + a.imag * b.imag


def angle_between(a: complex, b: complex) -> float:
    """Unsigned angle from a to b in (-pi, pi], counterclockwise positive."""
    return math.atan2(cross(a, b), dot(a, b))


def triangle_area(u: complex, v: complex) -> float:
    """Signed area of the triangle with edge vectors u then v."""
    return 0.5 * cross(u, v)


def circumradius(u: complex, v: complex) -> float:
    """Circumradius of the triangle with edge vectors u, v (third is -u-v)."""
    w = -u - v
    area = abs(triangle_area(u, v))
    if area == 0.0:
        return math.inf
    return abs(u) * abs(v) * abs(w) / (4.0 * area)


def circumcenter(a: complex, b: complex, c: complex) -> complex:
    """Circumcenter of the triangle with corners a, b, c."""
    d = 2.0 * cross(b - a, c - a)
    if d == 0.0:
        raise ZeroDivisionError("collinear triangle has no circumcenter")
    ux = (
        abs(b - a) ** 2 * (c - a).imag - abs(c - a) ** 2 * (b - a).imag
    ) / d
    uy = (
        abs(c - a) ** 2 * (b - a).real - abs(b - a) ** 2 * (c - a).real
    ) / d
    return a + complex(ux, uy)


def seg_intersection_params(p: complex, r: complex, q: complex, s: complex):
    """Parameters (t, u) with p + t*r = q + u*s, or None for parallel."""
    den = cross(r, s)
    if den == 0.0:
        return None
    t = cross(q - p, s) / den
    u = cross(q - p, r) / den
    return t, u


def segments_cross(a1, a2, b1, b2, tol=1e-12):
    """True iff open segments (a1,a2) and (b1,b2) share an interior point."""
    r = a2 - a1
    s = b2 - b1
    params = seg_intersection_params(a1, r, b1, s)
    if params is None:
        return False
    t, u = params
    return tol < t < 1.0 - tol and tol < u < 1.0 - tol


def polygon_signed_area(pts) -> float:
    total = 0.0
    m = len(pts)
    for i in range(m):
        total += cross(pts[i], pts[(i + 1) % m])
    return 0.5 * total


def polygon_is_simple(pts, tol=1e-12) -> bool:
    """Check that no two non-adjacent sides of the closed polygon intersect."""
    m = len(pts)
    sides = [(pts[i], pts[(i + 1) % m]) for i in range(m)]
    for i in range(m):
        a1, a2 = sides[i]
        if abs(a2 - a1) <= tol:
            return False
        for j in range(i + 1, m):
            if j == i or (j + 1) % m == i or (i + 1) % m == j:
                continue
            b1, b2 = sides[j]
            if segments_cross(a1, a2, b1, b2, tol=tol):
                return False
            # touching at a non-shared endpoint also breaks simplicity
            for q in (b1, b2):
                r = a2 - a1
                t = dot(q - a1, r) / dot(r, r)
                if tol < t < 1.0 - tol and abs(a1 + t * r - q) <= tol * max(1.0, abs(r)):
                    return False
    return True


def point_in_triangle(p: complex, a: complex, b: complex, c: complex, tol=0.0) -> bool:
    """Strict containment when tol > 0 shrinks toward the interior."""
    d1 = cross(b - a, p - a)
    d2 = cross(c - b, p - b)
    d3 = cross(a - c, p - c)
    return d1 > tol and d2 > tol and d3 > tol


def clip_polygon_halfplane(pts, a: complex, n: complex):
    """Keep the part of convex/simple polygon `pts` with dot(p - a, n) <= 0.

    Sutherland-Hodgman step; returns a new vertex list (possibly empty).
    """
    out = []
    m = len(pts)
    for i in range(m):
        p = pts[i]
        q = pts[(i + 1) % m]
        dp = dot(p - a, n)
        dq = dot(q - a, n)
        if dp <= 0.0:
            out.append(p)
            if dq > 0.0:
                t = dp / (dp - dq)
                out.append(p + t * (q - p))
        elif dq <= 0.0:
            t = dp / (dp - dq)
            out.append(p + t * (q - p))
    return out


def clip_polygon_convex(pts, clip):
    """Clip polygon `pts` against convex polygon `clip` (ccw)."""
    out = list(pts)
    m = len(clip)
    for i in range(m):
        if not out:
            return []
        a = clip[i]
        b = clip[(i + 1) % m]
        edge = b - a
        # inside = left of edge; keep dot(p-a, n)<=0 with n = clockwise normal
        n = complex(edge.imag, -edge.real)
        out = clip_polygon_halfplane(out, a, n)
    return out


def convex_polygon_area(pts) -> float:
    if len(pts) < 3:
        return 0.0
    return abs(polygon_signed_area(pts))


def ear_clip(pts, tol=1e-12):
    """Triangulate a simple polygon (ccw, collinear vertices allowed).

    Returns triangles as index triples into pts.  Raises ValueError when no
    ear can be found, which for a simple polygon means degenerate input.
    """
    m = len(pts)
    idx = list(range(m))
    tris = []
    scale = max(abs(p) for p in pts) or 1.0
    area_tol = tol * scale * scale
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * m * m:
            raise ValueError("ear clipping failed to make progress")
        found = False
        k = len(idx)
        for ii in range(k):
            i0, i1, i2 = idx[ii - 1], idx[ii], idx[(ii + 1) % k]
            a, b, c = pts[i0], pts[i1], pts[i2]
            if cross(b - a, c - b) <= area_tol:
                continue  # reflex or straight corner, not an ear
            ok = True
            for jj in idx:
                if jj in (i0, i1, i2):
                    continue
                q = pts[jj]
                if point_in_triangle(q, a, b, c, tol=-area_tol):
                    ok = False
                    break
                # vertex sitting on the would-be diagonal blocks the ear
                r = c - a
                t = dot(q - a, r) / dot(r, r)
                if 0.0 < t < 1.0 and abs(a + t * r - q) <= tol * scale:
                    ok = False
                    break
            if not ok:
                continue
            tris.append((i0, i1, i2))
            del idx[ii]
            found = True
            break
        if not found:
            raise ValueError("no ear found; polygon may be degenerate")
    i0, i1, i2 = idx
    if cross(pts[i1] - pts[i0], pts[i2] - pts[i1]) <= area_tol:
        raise ValueError("final triangle degenerate")
    tris.append((i0, i1, i2))
    return tris
