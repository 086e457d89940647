"""Stratum signatures for translation surfaces.

A surface with cone angles 2*pi*(k_i + 1) lives in the stratum H(k_1, ..., k_l)
with sum(k_i) = 2g - 2.  Order-0 entries are marked regular points and are only
legal when explicitly allowed (test fixtures such as the square torus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonPositiveOrder, OddTotalOrder


@dataclass(frozen=True)
class StratumSignature:
    orders: tuple[int, ...]
    genus: int
    num_singularities: int
    dim_complex: int

    def __str__(self):
        return "(" + ",".join(str(k) for k in self.orders) + ")"


def stratum_from_orders(orders, allow_marked_points=False) -> StratumSignature:
    """Build a stratum signature from cone-point orders.

    Orders are sorted descending.  Raises NonPositiveOrder for k <= 0
    (k == 0 allowed when allow_marked_points is set), OddTotalOrder when
    sum(k) is odd.
    """
    orders = tuple(sorted((int(k) for k in orders), reverse=True))
    if not orders:
        raise NonPositiveOrder("at least one cone point or marked point required")
    for k in orders:
        if k < 0 or (k == 0 and not allow_marked_points):
            raise NonPositiveOrder(f"order {k} not allowed here")
    total = sum(orders)
    if total % 2 != 0:
        raise OddTotalOrder(f"orders sum to {total}, expected 2g-2")
    genus = total // 2 + 1
    ell = len(orders)
    return StratumSignature(
        orders=orders,
        genus=genus,
        num_singularities=ell,
        dim_complex=2 * genus + ell - 1,
    )


def crad_lower_bound(stratum: StratumSignature) -> float:
    """Universal lower bound for the covering radius of a unit-area surface.

    Any triangulation using only the l singularities as vertices has
    2*(2g + l - 2) triangles, so the largest triangle has area at least
    1 / (2*(2g + l - 2)).  A triangle of area A fits in no circle smaller
    than sqrt(4*A / (3*sqrt(3))), which gives the bound below.
    """
    g = stratum.genus
    ell = stratum.num_singularities
    tris = 2 * g + ell - 2
    if tris <= 0:
        raise NonPositiveOrder("stratum too small for a triangle bound")
    return math.sqrt(2.0 / (3.0 * math.sqrt(3.0) * tris))
