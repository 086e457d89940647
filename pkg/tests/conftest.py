"""Shared fixtures: reference surfaces and seeded random square-tiled data."""

from __future__ import annotations

import random

import pytest

from flatstrata import fixtures
from flatstrata.surface import build_square_tiled


@pytest.fixture
def torus():
    return fixtures.unit_torus()


@pytest.fixture
def l_origami():
    return fixtures.l_origami()


@pytest.fixture
def octagon():
    return fixtures.regular_octagon()


@pytest.fixture
def thin_torus():
    return fixtures.flat_torus(10.0, 0.1)


def random_origami_perms(rng: random.Random, n: int):
    """Transitive pair (h, v) of permutations of range(n)."""
    while True:
        h = list(range(n))
        v = list(range(n))
        rng.shuffle(h)
        rng.shuffle(v)
        seen = {0}
        stack = [0]
        while stack:
            s = stack.pop()
            for img in (h[s], v[s], h.index(s), v.index(s)):
                if img not in seen:
                    seen.add(img)
                    stack.append(img)
        if len(seen) == n:
            return h, v


def origami_surface(n, h, v):
    """Square-tiled surface keeping all lattice corners as vertices."""
    return build_square_tiled(n, h, v, allow_marked_points=True)
