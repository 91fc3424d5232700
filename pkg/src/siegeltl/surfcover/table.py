"""Growth table of Jensen-square-sum data over a list of covers."""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, fields
from fractions import Fraction

from ..polyinv import format_polynomial, invariants
from .cover import build_cover, lift_action
from .words import SurfaceAutomorphism

CS_SLACK_FLOOR = -1e-12


@dataclass(frozen=True)
class GrowthRow:
    cover: str
    n: int
    genus: int
    charpoly_digest: str
    charpoly_degree: int
    m: float
    w: float
    h: float
    m_over_n: float
    sqrt_w_over_n: float
    sqrt_genus_over_n: float
    cs_slack: float
    wp_flag: bool | None = None


def digest(poly) -> str:
    return hashlib.sha256(format_polynomial(poly).encode()).hexdigest()[:16]


def growth_row(auto: SurfaceAutomorphism, quotient, wp_bound: float | None = None) -> GrowthRow:
    cover = build_cover(quotient)
    lifted = lift_action(cover, auto)
    P = lifted.char_poly
    m, w, h = invariants(P)
    n, gp = cover.degree, cover.genus
    sw = math.sqrt(w / n)
    sg = math.sqrt(Fraction(gp, n))
    flag = None if wp_bound is None else sw <= wp_bound / math.sqrt(4 * math.pi)
    return GrowthRow(quotient.label(), n, gp, digest(P), P.degree, m, w, h, m / n, sw, sg,
                     sw * sg - m / n, flag)


def growth_table(auto: SurfaceAutomorphism, covers, wp_bound: float | None = None) -> list:
    """One row per quotient, in input order."""
    if wp_bound is not None and not wp_bound >= 0:
        raise ValueError("wp_bound must be a nonnegative number")
    return [growth_row(auto, q, wp_bound) for q in covers]


def table_csv(rows, with_flag: bool) -> str:
    names = [f.name for f in fields(GrowthRow)]
    if not with_flag:
        names.remove("wp_flag")
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(names)
    for r in rows:
        vals = []
        for name in names:
            v = getattr(r, name)
            if isinstance(v, bool):
                v = str(v).lower()
            elif isinstance(v, float):
                v = format(v, ".17g")
            vals.append(v)
        out.writerow(vals)
    return buf.getvalue()
