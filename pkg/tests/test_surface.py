import math
import random

import pytest

from conftest import origami_surface, random_origami_perms
from flatstrata import fixtures
from flatstrata.errors import (
    EmptyStratum,
    InvalidSurface,
    NonMatchingSides,
    NotTransitive,
    ParseError,
    SelfIntersectingPolygon,
    ZeroAreaSurface,
)
from flatstrata.surface import (
    TranslationSurface,
    build_from_polygon,
    build_square_tiled,
    settle_marked_points,
)


# ------------------------------------------------------------- builders


def test_unit_torus_basics(torus):
    assert torus.n_triangles == 2
    assert abs(torus.area - 1.0) < 1e-12
    assert torus.stratum.orders == (0,)
    assert torus.stratum.genus == 1
    assert len(torus.vertices) == 1
    assert torus.singular_vertices() == ()
    assert torus.validate().ok


def test_torus_requires_marked_point_opt_in():
    with pytest.raises(EmptyStratum):
        build_from_polygon([0j, 1 + 0j, 1 + 1j, 1j], [(0, 2), (1, 3)])


def test_l_origami_basics(l_origami):
    assert l_origami.n_triangles == 6
    assert abs(l_origami.area - 3.0) < 1e-12
    assert l_origami.stratum.orders == (2,)
    assert l_origami.stratum.genus == 2
    assert len(l_origami.vertices) == 1
    v = l_origami.vertices[0]
    assert abs(v.angle - 6 * math.pi) < 1e-9
    assert l_origami.validate().ok


def test_octagon_basics(octagon):
    assert octagon.stratum.orders == (2,)
    assert abs(octagon.area - 2.0 * (1.0 + math.sqrt(2.0))) < 1e-9
    assert len(octagon.vertices) == 1
    assert octagon.validate().ok


def test_square_tiled_one_based_permutations():
    a = build_square_tiled(3, [1, 0, 2], [2, 1, 0], allow_marked_points=True)
    b = build_square_tiled(3, [2, 1, 3], [3, 2, 1], allow_marked_points=True)
    assert a.stratum == b.stratum
    assert abs(a.area - b.area) < 1e-12


def test_square_tiled_rejects_intransitive():
    with pytest.raises(NotTransitive):
        build_square_tiled(2, [0, 1], [0, 1])


def test_square_tiled_rejects_bad_permutation():
    with pytest.raises(ValueError):
        build_square_tiled(3, [0, 0, 1], [1, 2, 0])
    with pytest.raises(ValueError):
        build_square_tiled(3, [0, 1], [1, 2, 0])


def test_polygon_rejects_mismatched_sides():
    # side 0 has length 2, side 2 has length 1
    with pytest.raises(NonMatchingSides):
        build_from_polygon(
            [0j, 2 + 0j, 2 + 1j, 1 + 1j],
            [(0, 2), (1, 3)],
            allow_marked_points=True,
        )


def test_polygon_rejects_bowtie():
    # self-crossing quadrilateral with positive signed area
    with pytest.raises(SelfIntersectingPolygon):
        build_from_polygon(
            [0j, 4 + 0j, 1 + 2j, 3 + 2j],
            [(0, 2), (1, 3)],
            allow_marked_points=True,
        )
    # the symmetric bowtie has vanishing signed area instead
    with pytest.raises(ZeroAreaSurface):
        build_from_polygon(
            [0j, 1 + 1j, 1 + 0j, 1j],
            [(0, 2), (1, 3)],
            allow_marked_points=True,
        )


def test_polygon_rejects_clockwise():
    with pytest.raises(ZeroAreaSurface):
        build_from_polygon(
            [0j, 1j, 1 + 1j, 1 + 0j],
            [(0, 2), (1, 3)],
            allow_marked_points=True,
        )


def test_polygon_pairing_must_cover_sides():
    with pytest.raises(ValueError):
        build_from_polygon(
            [0j, 1 + 0j, 1 + 1j, 1j],
            [(0, 2), (1, 1)],
            allow_marked_points=True,
        )


def test_marked_points_settle_to_empty_stratum():
    with pytest.raises(EmptyStratum):
        build_square_tiled(2, [1, 0], [0, 1])
    s = build_square_tiled(2, [1, 0], [0, 1], allow_marked_points=True)
    assert s.stratum.orders == (0, 0)
    assert s.stratum.genus == 1


# -------------------------------------------------------------- scaling


def test_rescale_scales_area_linearly(l_origami):
    lam = 2.7
    bigger = l_origami.rescale(lam)
    assert abs(bigger.area - lam * l_origami.area) < 1e-9
    f = math.sqrt(lam)
    for z, w in zip(bigger.vec, l_origami.vec):
        assert abs(z - f * w) < 1e-12 * f
    with pytest.raises(ValueError):
        l_origami.rescale(0.0)
    with pytest.raises(ValueError):
        l_origami.rescale(-1.0)


def test_normalize_area(octagon):
    unit = octagon.normalize_area()
    assert abs(unit.area - 1.0) < 1e-12
    assert unit.stratum == octagon.stratum


# -------------------------------------------------------- serialization


def test_serialize_round_trip_bitwise(torus, l_origami, octagon):
    for srf in (torus, l_origami, octagon, fixtures.flat_torus(10.0, 0.1)):
        text = srf.serialize()
        back = TranslationSurface.deserialize(text)
        assert back.serialize() == text
        assert back.vec == srf.vec
        assert back.opp == srf.opp
        assert back.marked == srf.marked
        assert back.stratum == srf.stratum


def test_serialize_round_trip_random_origamis():
    rng = random.Random(2024)
    for n in (2, 3, 4, 5, 6):
        h, v = random_origami_perms(rng, n)
        srf = origami_surface(n, h, v)
        text = srf.serialize()
        assert TranslationSurface.deserialize(text).serialize() == text


def test_deserialize_rejects_bad_header():
    with pytest.raises(ParseError, match="line 1"):
        TranslationSurface.deserialize("TSF9\nstratum 0\nhalfedges 6\n")


def test_deserialize_rejects_truncation(torus):
    text = torus.serialize()
    lines = text.splitlines()
    with pytest.raises(ParseError):
        TranslationSurface.deserialize("\n".join(lines[:-1]))
    with pytest.raises(ParseError):
        TranslationSurface.deserialize("\n".join(lines[:2]))


def test_deserialize_rejects_bad_fields(torus):
    text = torus.serialize()
    lines = text.splitlines()
    lines[3] = lines[3] + " extra"
    with pytest.raises(ParseError, match="line 4"):
        TranslationSurface.deserialize("\n".join(lines))
    lines = text.splitlines()
    lines[4] = lines[4].replace(lines[4].split()[3], "not-a-number", 1)
    with pytest.raises(ParseError):
        TranslationSurface.deserialize("\n".join(lines))


def test_deserialize_rejects_broken_involution(torus):
    text = torus.serialize()
    lines = text.splitlines()
    fields = lines[3].split()
    fields[1] = fields[0]  # opp(e) = e
    lines[3] = " ".join(fields)
    with pytest.raises(ParseError, match="involution"):
        TranslationSurface.deserialize("\n".join(lines))


def test_deserialize_rejects_duplicate_ids(torus):
    text = torus.serialize()
    lines = text.splitlines()
    lines[4] = lines[3]
    with pytest.raises(ParseError, match="repeated"):
        TranslationSurface.deserialize("\n".join(lines))


def test_deserialize_validates_geometry(torus):
    text = torus.serialize()
    lines = text.splitlines()
    fields = lines[3].split()
    fields[3] = "0.25"  # perturb one vector: triangle no longer closes
    lines[3] = " ".join(fields)
    with pytest.raises(InvalidSurface) as info:
        TranslationSurface.deserialize("\n".join(lines))
    assert info.value.report.violations
    # without checking, the parse itself succeeds
    srf = TranslationSurface.deserialize("\n".join(lines), check=False)
    assert not srf.validate().ok


def test_validate_flags_direct_breakage(torus):
    vec = list(torus.vec)
    vec[0] = vec[0] * 1.5
    broken = TranslationSurface(torus.opp, vec, torus.marked, torus.stratum)
    report = broken.validate()
    assert not report.ok
    assert any("close" in v or "opposite" in v for v in report.violations)


# --------------------------------------------------------------- edits


def _diagonal_edge(srf):
    return max(range(srf.n_half_edges), key=lambda e: abs(srf.vec[e]))


def test_flip_preserves_surface(torus):
    mut = torus.mutable()
    e = _diagonal_edge(torus)
    old = sorted((round(z.real, 9), round(z.imag, 9)) for z in torus.vec)
    mut.flip_edge(e)
    out = mut.finalize()
    assert abs(out.area - 1.0) < 1e-12
    assert out.stratum.orders == (0,)
    assert out.validate().ok
    new = sorted((round(z.real, 9), round(z.imag, 9)) for z in out.vec)
    assert new != old  # diagonal actually changed
    # flipping back restores the vector multiset
    mut2 = out.mutable()
    mut2.flip_edge(_diagonal_edge(out))
    back = mut2.finalize()
    restored = sorted((round(z.real, 9), round(z.imag, 9)) for z in back.vec)
    assert restored == old


def _centroid(srf_or_mut, tri):
    v0 = srf_or_mut.vec[3 * tri]
    v1 = srf_or_mut.vec[3 * tri + 1]
    return (2.0 * v0 + v1) / 3.0


def test_flip_refuses_reflex_quadrilateral(torus):
    mut = torus.mutable()
    # a vertex split very close to a corner creates skinny triangles whose
    # outer quadrilateral is reflex at the new vertex
    mut.split_triangle(0, 0.08 * _centroid(mut, 0))
    bad = [e for e in mut.live_edges() if mut.flip_gain(e) <= 0.0]
    assert bad
    for e in bad:
        with pytest.raises(ValueError):
            mut.flip_edge(e)


def test_split_edge_and_settle_back(torus):
    mut = torus.mutable()
    res = mut.split_edge(0, 0.375)
    assert mut.opp[res.a_to_p] == res.p_to_a
    assert mut.opp[res.b_to_p] == res.p_to_b
    mid = mut.finalize()
    assert abs(mid.area - 1.0) < 1e-12
    assert len(mid.vertices) == 2
    # the transient state is flagged: its new flat vertex is unmarked
    report = mid.validate()
    assert not report.ok
    assert any("flat vertex" in msg for msg in report.violations)
    # settling without permission removes the vertex again
    mut2 = mid.mutable()
    settle_marked_points(mut2, allow_marked_points=False)
    out = mut2.finalize()
    assert out.n_triangles == 2
    assert abs(out.area - 1.0) < 1e-12
    assert out.stratum.orders == (0,)
    assert out.validate().ok


def test_split_triangle_and_settle_back(l_origami):
    mut = l_origami.mutable()
    res = mut.split_triangle(2, _centroid(mut, 2))
    assert mut.opp[res.a_to_p] == res.p_to_a
    mid = mut.finalize()
    assert abs(mid.area - 3.0) < 1e-12
    assert mid.stratum.orders == (2, 0)
    mut2 = mid.mutable()
    settle_marked_points(mut2, allow_marked_points=False)
    out = mut2.finalize()
    assert out.stratum.orders == (2,)
    assert abs(out.area - 3.0) < 1e-12
    assert out.validate().ok


def test_split_edge_rejects_bad_parameter(torus):
    mut = torus.mutable()
    for t in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ValueError):
            mut.split_edge(0, t)


def test_random_origamis_validate():
    rng = random.Random(99)
    for n in (2, 3, 4, 5, 6):
        h, v = random_origami_perms(rng, n)
        srf = origami_surface(n, h, v)
        assert abs(srf.area - n) < 1e-9
        assert srf.validate().ok
        total = sum(srf.stratum.orders)
        assert total == 2 * srf.stratum.genus - 2
        # Euler characteristic of the square complex
        assert len(srf.vertices) - 2 * n + n == 2 - 2 * srf.stratum.genus
