r"""Combinatorial atlases of isoperiodic leaves.

An atlas is an exact, finitely truncated description of a leaf: its
chambers, the segmentation of their boundary lines, the wall gluings
identifying boundary segments pairwise by affine maps, and the singular
completion points where several chamber corners meet.

The four leaf kinds have different chamber menageries:

* positive leaves: one torus chamber (a plane with a slit ray at every
  primitive period) and one cylinder chamber per primitive period;
* negative leaves: cylinder chambers indexed by primitive periods and
  degenerate (triangle) chambers indexed by characteristic triples;
* arithmetic real leaves: two half-plane chambers per admissible index
  pair ``(k, l)``, glued by the four boundary rules below;
* non-arithmetic real leaves: cylinder chambers only; the degenerate
  triangles of volume-negative leaves collapse to zero area under the
  contraction flow and leave direct cylinder-to-cylinder gluings.

All boundary coordinates, gluing maps and sector angles are exact; cone
angles at singular points are certified in integer multiples of
:math:`\pi` by a wrap-counting product over exact sector ratios.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from isoleaf.period_algebra import (
    CharacteristicTriple,
    FieldElement,
    GroundField,
    IsoleafError,
    LatticeElement,
    PeriodCharacter,
    WrongLeafKind,
    pm_representative,
    symplectic_partner,
)
from isoleaf.surface_kernel import SlitDegenerateSurface, cylinder_boundary_surface

__all__ = [
    "BadSegment",
    "NotAVertex",
    "NotInterior",
    "NonIntegralStar",
    "RationalTheta",
    "NonQuadraticTheta",
    "TorusChamber",
    "CylChamber",
    "CylArithChamber",
    "DegChamber",
    "BoundarySegment",
    "Gluing",
    "Sector",
    "Singularity",
    "Atlas",
    "CheckReport",
    "build_positive",
    "build_negative",
    "build_arithmetic",
    "build_nonarith",
    "glue_target",
    "singularity_star",
    "connectivity_check",
    "arithmetic_reachability",
    "wall_surface_match",
    "wall_tree",
    "WallTree",
    "WallTreeNode",
    "check_atlas",
    "adjacency_graph",
    "atlas_to_json_dict",
    "atlas_from_json_dict",
    "primitive_elements",
]


class BadSegment(IsoleafError):
    """Raised when a boundary segment is not one of a chamber's canonical segments."""


class NotAVertex(IsoleafError):
    """Raised when a point is not a segmentation vertex of the chamber boundary."""


class NotInterior(IsoleafError):
    """Raised when a sample point sits on a segment endpoint instead of inside."""


class RationalTheta(IsoleafError):
    """Raised when a slope presented as irrational is in fact rational."""


class NonQuadraticTheta(IsoleafError):
    """Raised when a slope is not given exactly in a real quadratic field."""


# ---------------------------------------------------------------------------
# chamber identifiers


@dataclass(frozen=True)
class TorusChamber:
    """The slit-plane chamber of a positive leaf."""

    def sort_key(self):
        return (0,)


@dataclass(frozen=True)
class CylChamber:
    """Cylinder chamber CC_u of a lattice or non-arithmetic leaf."""

    u: LatticeElement

    def __post_init__(self):
        if self.u.is_zero() or gcd(self.u.m, self.u.n) != 1:
            raise IsoleafError(f"cylinder chambers need a primitive class, got {self.u}")

    def sort_key(self):
        return (1, self.u.max_norm(), self.u.m, self.u.n)


@dataclass(frozen=True)
class CylArithChamber:
    """Half-plane chamber CC^sign_{k,l} of an arithmetic leaf."""

    k: int
    l: int
    sign: int

    def __post_init__(self):
        if self.k < 1 or not 0 <= self.l < self.k or gcd(self.k, self.l) != 1:
            raise IsoleafError(f"({self.k}, {self.l}) is not an admissible index pair")
        if self.sign not in (1, -1):
            raise IsoleafError("chamber sign must be +1 or -1")

    def sort_key(self):
        return (1, self.k, self.l, -self.sign)


@dataclass(frozen=True)
class DegChamber:
    """Degenerate (triangle) chamber of a negative leaf."""

    triple: CharacteristicTriple

    def sort_key(self):
        return (2,) + self.triple.sort_key()


def _chamber_key(c):
    return c.sort_key()


# ---------------------------------------------------------------------------
# segments and gluings


@dataclass(frozen=True)
class BoundarySegment:
    """An open interval on one boundary component of a chamber.

    ``part`` names the component (the boundary line, a slit side, or a
    triangle side); ``lo``/``hi`` are exact endpoint coordinates, with
    ``None`` meaning the segment is an infinite ray in that direction.
    """

    chamber: object
    part: tuple
    lo: FieldElement | None
    hi: FieldElement | None

    def key(self):
        return (
            _chamber_key(self.chamber),
            self.part_key(),
            _coord_key(self.lo, -1),
            _coord_key(self.hi, +1),
        )

    def part_key(self):
        out = []
        for x in self.part:
            if isinstance(x, LatticeElement):
                out.append(("lat", x.m, x.n))
            else:
                out.append(x)
        return tuple(out)


def _coord_key(x, inf_sign):
    if x is None:
        return (inf_sign, 0, 1, 0, 1)
    return (0, x.a.numerator, x.a.denominator, x.b.numerator, x.b.denominator)


@dataclass(frozen=True)
class Gluing:
    """An exact isometric identification ``x_b = sigma * x_a + c``."""

    seg_a: BoundarySegment
    seg_b: BoundarySegment
    sigma: int
    c: FieldElement

    def map_coord(self, x: FieldElement) -> FieldElement:
        return self.sigma * x + self.c

    def reverse(self) -> "Gluing":
        # x_a = sigma * x_b - sigma * c
        return Gluing(self.seg_b, self.seg_a, self.sigma, -self.sigma * self.c)

    def key(self):
        return (
            self.seg_a.key(),
            self.seg_b.key(),
            self.sigma,
            _coord_key(self.c, 0),
        )


# ---------------------------------------------------------------------------
# sectors and singular points


@dataclass(frozen=True)
class Sector:
    """One chamber corner incident to a singular point.

    Either an exact multiple of pi (``half_turns``) or a corner whose
    angle is ``arg(ratio)`` with ``Im(ratio) > 0`` in the Gaussian field.
    """

    chamber: object
    vertex: tuple
    half_turns: int | None = None
    ratio: FieldElement | None = None


class NonIntegralStar(IsoleafError):
    """Raised if sector ratios fail to multiply to a real number."""


def total_half_turns(sectors) -> int:
    """Exact total angle of a cyclic sector list, in units of pi.

    Pure half-turn sectors add directly.  Ratio sectors have angles
    ``arg(r_i)`` in (0, pi); their sum is recovered exactly by counting
    how often the running product of the ratios crosses the positive real
    axis, and checking the final product is real.
    """
    total = 0
    ratios = []
    for s in sectors:
        if s.half_turns is not None:
            total += s.half_turns
        else:
            ratios.append(s.ratio)
    if ratios:
        F = ratios[0].field
        p = F.one()
        wraps = 0
        for r in ratios:
            if r.imag_fraction() <= 0:
                raise NonIntegralStar("sector ratios must have positive imaginary part")
            q = p * r
            if p.imag_fraction() < 0 and (
                q.imag_fraction() > 0 or (q.imag_fraction() == 0 and q.a > 0)
            ):
                wraps += 1
            p = q
        if p.imag_fraction() != 0:
            raise NonIntegralStar("sector ratios do not close up to a straight angle")
        total += 2 * wraps
        if p.a < 0:
            total += 1
    return total


@dataclass(frozen=True)
class Singularity:
    """A singular completion point with its cyclic star of sectors."""

    ident: tuple
    sectors: tuple
    total: int
    tag: str | None = None


# ---------------------------------------------------------------------------
# the atlas


@dataclass
class Atlas:
    """Chambers + segmentation + gluings + singular stars of one leaf."""

    kind: str
    character: PeriodCharacter
    bound: int
    chambers: list
    gluings: list
    truncated: list
    singularities: list
    center: Singularity | None = None
    complete: dict = field(default_factory=dict)
    _germ_index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._build_index()

    def _build_index(self):
        self._germ_index = {}
        for g in self.gluings:
            seg = g.seg_a
            if seg.lo is not None:
                self._germ_index[(seg.chamber, seg.part, _fe_key(seg.lo), +1)] = g
            if seg.hi is not None:
                self._germ_index[(seg.chamber, seg.part, _fe_key(seg.hi), -1)] = g

    def glued_segments(self):
        return [g.seg_a for g in self.gluings]

    def field(self) -> GroundField:
        if self.kind == "nonarith_real":
            return self.character.field
        return GroundField.rational()


def _fe_key(x: FieldElement):
    return (x.a, x.b)


@dataclass
class CheckReport:
    """Outcome of the atlas invariant suite."""

    passed: bool
    checks: list
    failures: list


# ---------------------------------------------------------------------------
# shared helpers


def primitive_elements(bound: int) -> list[LatticeElement]:
    """All primitive integer pairs of max-norm at most ``bound``, sorted."""
    out = []
    for m in range(-bound, bound + 1):
        for n in range(-bound, bound + 1):
            if (m, n) != (0, 0) and gcd(m, n) == 1:
                out.append(LatticeElement(m, n))
    out.sort(key=lambda u: (u.max_norm(), u.m, u.n))
    return out


def _coord_triples(bound: int) -> list[CharacteristicTriple]:
    """Characteristic triples by coordinates only (no leaf-kind check)."""
    out = set()
    rng = range(-bound, bound + 1)
    for m1 in rng:
        for n1 in rng:
            a = LatticeElement(m1, n1)
            if a.is_zero():
                continue
            for m2 in rng:
                for n2 in rng:
                    b = LatticeElement(m2, n2)
                    if a.det(b) != 1:
                        continue
                    c = -a - b
                    if c.max_norm() > bound:
                        continue
                    out.add(CharacteristicTriple.make(a, b, c))
    return sorted(out, key=CharacteristicTriple.sort_key)


def _pool_map(fn, items):
    """Deterministic map, parallel over a small worker pool if configured."""
    threads = int(os.environ.get("ISOLEAF_THREADS", "1") or "1")
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _dedupe_gluings(records) -> list[Gluing]:
    seen = {}
    for g in records:
        seen[g.key()] = g
    return [seen[k] for k in sorted(seen)]


def _with_reverses(records):
    out = list(records)
    out.extend(g.reverse() for g in records)
    return _dedupe_gluings(out)


# ---------------------------------------------------------------------------
# positive leaves


def build_positive(bound: int) -> Atlas:
    """Atlas of the positive leaf normalized to periods (1, i).

    The torus chamber is a plane with one slit ray ``{t gamma : t >= 1}``
    per primitive period ``gamma``; the left side of each slit glues to
    the positive boundary ray of CC_gamma and the right side to the
    negative boundary ray of CC_{-gamma}, both by ``t -> t - 1`` in units
    of ``gamma``.  Each pair ``{gamma, -gamma}`` of slit tips closes up
    into one 6-pi singular point; the puncture ``alpha = 0`` is the
    completion point where the slit vanishes.
    """
    if bound < 1:
        raise WrongLeafKind("positive atlases need bound >= 1")
    chi = PeriodCharacter.gaussian((1, 0), (0, 1))
    Q = GroundField.rational()
    torus = TorusChamber()
    prims = primitive_elements(bound)
    chambers = [torus] + [CylChamber(u) for u in prims]

    def records_for(gamma: LatticeElement):
        one = Q.element(1)
        slit_l = BoundarySegment(torus, ("slit", gamma, "L"), one, None)
        slit_r = BoundarySegment(torus, ("slit", gamma, "R"), one, None)
        ray_pos = BoundarySegment(CylChamber(gamma), ("line",), Q.element(0), None)
        ray_neg = BoundarySegment(CylChamber(-gamma), ("line",), None, Q.element(0))
        return [
            Gluing(slit_l, ray_pos, +1, Q.element(-1)),
            Gluing(slit_r, ray_neg, -1, Q.element(1)),
        ]

    records = [g for recs in _pool_map(records_for, prims) for g in recs]
    gluings = _with_reverses(records)
    atlas = Atlas(
        kind="positive",
        character=chi,
        bound=bound,
        chambers=chambers,
        gluings=gluings,
        truncated=[],
        singularities=[],
        complete={c: not isinstance(c, TorusChamber) for c in chambers},
    )
    reps = sorted(
        {pm_representative(u) for u in prims}, key=lambda u: (u.max_norm(), u.m, u.n)
    )
    for rep in reps:
        start = (torus, ("slit", rep, "L"), Q.element(1), +1)
        star = _walk_star(atlas, start, ident=("pos", (rep.m, rep.n)))
        atlas.singularities.append(star)
    return atlas


# ---------------------------------------------------------------------------
# negative leaves


def _partner_offset(u: LatticeElement, w: LatticeElement) -> int:
    """The integer m with w = symplectic_partner(u) + m * u."""
    p = symplectic_partner(u)
    d = w - p
    if u.m != 0:
        m, r = divmod(d.m, u.m)
    else:
        m, r = divmod(d.n, u.n)
    if r != 0 or p + u.scale(m) != w:
        raise BadSegment(f"{w} is not a partner translate of {u}")
    return m


def build_negative(bound: int) -> Atlas:
    """Atlas of the negative leaf normalized to periods (1, -i).

    Cylinder chambers CC_u carry the boundary coordinate ``t`` along
    ``z = v_can(u) + t u`` (``v_can`` the canonical symplectic partner
    period); the coarse segment ``(m, m+1)`` is glued to the side of
    direction ``u`` of the triangle chamber of the triple
    ``(u, v_can + m u, -u - (v_can + m u))``, by ``t = m + s``.
    """
    chi = PeriodCharacter.gaussian((1, 0), (0, -1))
    Q = GroundField.rational()
    prims = primitive_elements(bound)
    triples = _coord_triples(bound)
    chambers = [CylChamber(u) for u in prims] + [DegChamber(t) for t in triples]
    chambers.sort(key=_chamber_key)

    def records_for(T: CharacteristicTriple):
        recs = []
        for i in (1, 2, 3):
            a, b, _ = T.rotated(i - 1)
            m = _partner_offset(a, b)
            seg_side = BoundarySegment(
                DegChamber(T), ("side", i), Q.element(0), Q.element(1)
            )
            seg_line = BoundarySegment(
                CylChamber(a), ("line",), Q.element(m), Q.element(m + 1)
            )
            recs.append(Gluing(seg_side, seg_line, +1, Q.element(m)))
        return recs

    records = [g for recs in _pool_map(records_for, triples) for g in recs]
    gluings = _with_reverses(records)
    atlas = Atlas(
        kind="negative",
        character=chi,
        bound=bound,
        chambers=chambers,
        gluings=gluings,
        truncated=_cyl_truncation_rays(records, Q),
        singularities=[],
        complete={c: isinstance(c, DegChamber) for c in chambers},
    )
    _collect_stars(atlas)
    return atlas


def _cyl_truncation_rays(records, Q):
    glued = {}
    for g in records:
        seg = g.seg_b
        if isinstance(seg.chamber, (CylChamber,)) and seg.part == ("line",):
            lo = seg.lo.a
            glued.setdefault(seg.chamber, set()).add(lo)
    rays = []
    for chamber, ms in sorted(glued.items(), key=lambda kv: _chamber_key(kv[0])):
        lo, hi = min(ms), max(ms) + 1
        rays.append(BoundarySegment(chamber, ("line",), None, Q.element(lo)))
        rays.append(BoundarySegment(chamber, ("line",), Q.element(hi), None))
    return rays


def _deg_vertex_table(T: CharacteristicTriple):
    """Corner data of the chart triangle {0, a1, -a2}.

    Each corner: (label, germs at it, the two outgoing edge directions).
    Germ = (part, coordinate, direction); edge directions are lattice
    elements whose period values bound the corner sector.
    """
    a1, a2, a3 = T.elements()
    return {
        "v0": ((("side", 1), 0, +1), (("side", 2), 1, -1), (a1, -a2)),
        "v1": ((("side", 1), 1, -1), (("side", 3), 0, +1), (-a1, a3)),
        "v2": ((("side", 2), 0, +1), (("side", 3), 1, -1), (a2, -a3)),
    }


def _deg_vertex_of_germ(part, v: Fraction):
    i = part[1]
    at = {(1, 0): "v0", (2, 1): "v0", (1, 1): "v1", (3, 0): "v1", (2, 0): "v2", (3, 1): "v2"}
    key = (i, int(v))
    if key not in at:
        raise NotAVertex(f"side {i} has no corner at parameter {v}")
    return at[key]


def _corner_ratio(chi: PeriodCharacter, d1: LatticeElement, d2: LatticeElement) -> FieldElement:
    """Exact Im-positive ratio of the two corner directions."""
    w1 = chi.lattice_value(d1)
    w2 = chi.lattice_value(d2)
    r = w2 / w1
    if r.imag_fraction() < 0:
        r = w1 / w2
    if r.imag_fraction() == 0:
        raise NonIntegralStar("degenerate corner: directions are collinear")
    return r


# ---------------------------------------------------------------------------
# arithmetic leaves


def _admissible_pairs(kmax: int):
    return [
        (k, l)
        for k in range(1, kmax + 1)
        for l in range(0, k)
        if gcd(k, l) == 1
    ]


def _plus_records(k: int, l: int, kmax: int, Q: GroundField):
    """Wall records with source CC^+_{k,l}, targets within kmax.

    The four families (with w the source coordinate, all orientation
    preserving):

    1. ``(l-k, 0)``           -> CC^-_{k-l, l-n'(k-l)} at ``(-k, -l)``, w - l
    2. ``(-(n+1)k+l, -nk+l)`` -> CC^-_{(n+1)k-l, k}    at ``(-k, 0)``,  w + nk - l
    3. ``(0, l)``             -> CC^-_{l, (n'+1)l-k}   at ``(k-l, k)``, w + k - l
    4. ``(nk+l, (n+1)k+l)``   -> CC^-_{(n+1)k+l, nk+l} at ``(0, k)``,   w - nk - l
    """
    here = CylArithChamber(k, l, +1)
    recs = []

    def rec(lo, hi, k2, l2, c):
        if k2 > kmax:
            return
        seg_a = BoundarySegment(here, ("line",), Q.element(lo), Q.element(hi))
        seg_b = BoundarySegment(
            CylArithChamber(k2, l2, -1),
            ("line",),
            Q.element(lo + c),
            Q.element(hi + c),
        )
        recs.append(Gluing(seg_a, seg_b, +1, Q.element(c)))

    # family 1
    if k > l:
        n1 = l // (k - l)
        rec(l - k, 0, k - l, l - n1 * (k - l), -l)
    # family 2
    n = 1
    while (n + 1) * k - l <= kmax:
        rec(-(n + 1) * k + l, -n * k + l, (n + 1) * k - l, k, n * k - l)
        n += 1
    # family 3
    if l > 0:
        n3 = -(-k // l) - 1  # ceil(k/l) - 1
        rec(0, l, l, (n3 + 1) * l - k, k - l)
    # family 4
    n = 0
    while (n + 1) * k + l <= kmax:
        rec(n * k + l, (n + 1) * k + l, (n + 1) * k + l, n * k + l, -n * k - l)
        n += 1
    return recs


def _iota_image(g: Gluing) -> Gluing:
    """The marking involution (k,l,s) @ t -> (k,l,-s) @ -t on a record."""

    def flip_seg(seg: BoundarySegment) -> BoundarySegment:
        ch = seg.chamber
        return BoundarySegment(
            CylArithChamber(ch.k, ch.l, -ch.sign),
            seg.part,
            None if seg.hi is None else -seg.hi,
            None if seg.lo is None else -seg.lo,
        )

    return Gluing(flip_seg(g.seg_a), flip_seg(g.seg_b), g.sigma, -g.c)


def build_arithmetic(kmax: int) -> Atlas:
    """Atlas of the arithmetic leaf normalized to period group Z.

    Chambers are CC^±_{k,l} over admissible pairs with ``k <= kmax``.
    Plus-chamber boundaries are segmented by ``{n k + l} ∪ {0}``; minus
    chambers by the mirrored set.  Records are generated from the four
    plus-side families and closed under the marking involution and
    reversal.  The two pinched-torus half-stars at ``t = 0`` of the
    (1,0) chambers join into the 2-pi center.
    """
    if kmax < 1:
        raise WrongLeafKind("arithmetic atlases need kmax >= 1")
    chi = PeriodCharacter.rational(1, 0)
    Q = GroundField.rational()
    pairs = _admissible_pairs(kmax)
    chambers = [CylArithChamber(k, l, s) for (k, l) in pairs for s in (+1, -1)]
    chambers.sort(key=_chamber_key)

    plus = [g for recs in _pool_map(lambda kl: _plus_records(*kl, kmax, Q), pairs) for g in recs]
    records = plus + [_iota_image(g) for g in plus]
    gluings = _with_reverses(records)

    atlas = Atlas(
        kind="arith_real",
        character=chi,
        bound=kmax,
        chambers=chambers,
        gluings=gluings,
        truncated=_arith_truncation_rays(gluings, Q),
        singularities=[],
        complete={c: False for c in chambers},
    )
    _collect_stars(atlas)
    return atlas


def _arith_truncation_rays(gluings, Q):
    spans = {}
    for g in gluings:
        seg = g.seg_a
        lo, hi = seg.lo.a, seg.hi.a
        cur = spans.get(seg.chamber)
        spans[seg.chamber] = (
            (lo, hi) if cur is None else (min(cur[0], lo), max(cur[1], hi))
        )
    rays = []
    for chamber, (lo, hi) in sorted(spans.items(), key=lambda kv: _chamber_key(kv[0])):
        rays.append(BoundarySegment(chamber, ("line",), None, Q.element(lo)))
        rays.append(BoundarySegment(chamber, ("line",), Q.element(hi), None))
    return rays


def glue_target(k: int, l: int, sign: int, segment: tuple):
    """The wall record of one canonical boundary segment of CC^sign_{k,l}.

    ``segment`` is the exact endpoint pair ``(lo, hi)``.  Returns
    ``(k', l', sign', (lo', hi'), (sigma, c))``.

    Raises
    ------
    BadSegment
        If the interval is not a canonical segment of the chamber.
    """
    CylArithChamber(k, l, sign)  # validates the indices
    lo, hi = (Fraction(x) for x in segment)
    if sign == -1:
        k2, l2, s2, (lo2, hi2), (sigma, c) = glue_target(k, l, +1, (-hi, -lo))
        return (k2, l2, -s2, (-hi2, -lo2), (sigma, -c))
    if not (_on_segmentation(k, l, lo) and hi == _next_segmentation_point(k, l, lo)):
        raise BadSegment(f"({lo}, {hi}) is not a canonical segment of CC+_{k},{l}")
    Q = GroundField.rational()
    big = max(abs(lo), abs(hi))
    kmax_needed = int(big) + 2 * k + 2
    for g in _plus_records(k, l, kmax_needed, Q):
        if g.seg_a.lo.a == lo and g.seg_a.hi.a == hi:
            ch = g.seg_b.chamber
            return (
                ch.k,
                ch.l,
                ch.sign,
                (g.seg_b.lo.a, g.seg_b.hi.a),
                (g.sigma, g.c.a),
            )
    raise BadSegment(f"({lo}, {hi}) is not a canonical segment of CC+_{k},{l}")


def _on_segmentation(k: int, l: int, x: Fraction) -> bool:
    return x == 0 or (x - l) % k == 0


def _next_segmentation_point(k: int, l: int, x: Fraction) -> Fraction:
    n = (x - l) // k
    nxt = Fraction((n + 1) * k + l)
    if x < 0 < nxt:
        return Fraction(0)
    return nxt


# ---------------------------------------------------------------------------
# non-arithmetic leaves


def build_nonarith(theta, bound: int) -> Atlas:
    """Atlas of the real leaf with dense period group Z + theta Z.

    Computed as the exact contraction-flow limit of the volume-negative
    atlas: every triangle chamber flattens onto the boundary line, its
    longest side (in the theta-embedding) splitting at the image of the
    middle vertex into two direct cylinder-to-cylinder gluings.  Boundary
    coordinates are period values in Q(theta).

    Raises
    ------
    RationalTheta
        If theta is rational (the leaf would be arithmetic).
    NonQuadraticTheta
        If theta is not an exact real quadratic number.
    """
    if isinstance(theta, (int, Fraction)):
        raise RationalTheta(f"theta = {theta} is rational")
    if not isinstance(theta, FieldElement):
        raise NonQuadraticTheta(
            "theta must be an exact element of a real quadratic field"
        )
    if theta.field.tag != "quadratic":
        raise RationalTheta(f"theta = {theta} is rational")
    if theta.b == 0:
        raise RationalTheta(f"theta = {theta} is rational")
    F = theta.field
    theta = theta - theta.floor()
    chi = PeriodCharacter(F, F.one(), theta)

    prims = primitive_elements(bound)
    triples = _coord_triples(bound)
    chambers = [CylChamber(u) for u in prims]
    chambers.sort(key=_chamber_key)

    def records_for(T: CharacteristicTriple):
        return _collapsed_records(chi, T)

    records = [g for recs in _pool_map(records_for, triples) for g in recs]
    gluings = _with_reverses(records)
    atlas = Atlas(
        kind="nonarith_real",
        character=chi,
        bound=bound,
        chambers=chambers,
        gluings=gluings,
        truncated=[],
        singularities=[],
        complete={c: False for c in chambers},
    )
    _collect_stars(atlas)
    return atlas


def _collapsed_records(chi: PeriodCharacter, T: CharacteristicTriple):
    """The two limit gluings of one collapsed triangle, in value coordinates."""
    a1, a2, a3 = T.elements()
    p = chi.lattice_value(a1)
    q = -chi.lattice_value(a2)
    zero = chi.field.zero()
    # chart vertices of the flattened triangle on the real line
    verts = [(zero, "0"), (p, "p"), (q, "q")]
    verts.sort(key=lambda vw: vw[0])
    middle = verts[1][1]
    # side j connects chart points: 1: {0, p}; 2: {q, 0}; 3: {p, q}
    long_side = {"0": 3, "p": 2, "q": 1}[middle]
    shorts = [j for j in (1, 2, 3) if j != long_side]
    # chart -> boundary-coordinate offsets phi_j
    phi = {1: chi.lattice_value(a2), 2: -chi.lattice_value(a1), 3: zero}
    ends = {
        1: (zero, p),
        2: (q, zero),
        3: (p, q),
    }
    by_side = {1: a1, 2: a2, 3: a3}
    recs = []
    for j in shorts:
        lo, hi = ends[j]
        if (hi - lo).sign() < 0:
            lo, hi = hi, lo
        seg_a = BoundarySegment(
            CylChamber(by_side[j]), ("line",), lo + phi[j], hi + phi[j]
        )
        seg_b = BoundarySegment(
            CylChamber(by_side[long_side]),
            ("line",),
            lo + phi[long_side],
            hi + phi[long_side],
        )
        recs.append(Gluing(seg_a, seg_b, +1, phi[long_side] - phi[j]))
    return recs


# ---------------------------------------------------------------------------
# singularity stars (generic walk)


class _Unglued(IsoleafError):
    pass


def _cross(atlas: Atlas, germ):
    chamber, part, v, direction = germ
    g = atlas._germ_index.get((chamber, part, _fe_key(v), direction))
    if g is None:
        raise _Unglued(f"no gluing at {germ}")
    v2 = g.map_coord(v)
    return (g.seg_b.chamber, g.seg_b.part, v2, g.sigma * direction)


def _other_germ(atlas: Atlas, germ):
    """The second boundary germ at this chamber corner, plus the sector."""
    chamber, part, v, direction = germ
    if isinstance(chamber, TorusChamber):
        _, gamma, side = part
        other_side = "R" if side == "L" else "L"
        sector = Sector(chamber, ("tip", (gamma.m, gamma.n)), half_turns=2)
        return (chamber, ("slit", gamma, other_side), v, +1), sector
    if isinstance(chamber, (CylChamber, CylArithChamber)):
        sector = Sector(chamber, ("t", _fe_key(v)), half_turns=1)
        return (chamber, part, v, -direction), sector
    if isinstance(chamber, DegChamber):
        T = chamber.triple
        label = _deg_vertex_of_germ(part, v.a)
        g1, g2, (d1, d2) = _deg_vertex_table(T)[label]
        ratio = _corner_ratio(atlas.character, d1, d2)
        sector = Sector(chamber, ("corner", label), ratio=ratio)
        Q = GroundField.rational()
        mine = (part, int(v.a), direction)
        if mine == g1:
            o = g2
        elif mine == g2:
            o = g1
        else:
            raise NotAVertex(f"{germ} is not a corner germ of {chamber}")
        return (chamber, o[0], Q.element(o[1]), o[2]), sector
    raise NotAVertex(f"unsupported chamber {chamber!r}")


def _walk_star(atlas: Atlas, start, ident=None, tag=None, max_steps=64) -> Singularity:
    sectors = []
    g_in = start
    for _ in range(max_steps):
        g_out, sector = _other_germ(atlas, g_in)
        sectors.append(sector)
        g_in = _cross(atlas, g_out)
        if g_in == start:
            break
    else:
        raise NonIntegralStar(f"star walk from {start} did not close")
    if ident is None:
        ident = _star_ident(atlas, sectors)
    return Singularity(
        ident=ident, sectors=tuple(sectors), total=total_half_turns(sectors), tag=tag
    )


def _star_ident(atlas: Atlas, sectors) -> tuple:
    kind = atlas.kind
    if kind == "positive":
        tips = {
            pm_representative(LatticeElement(*s.vertex[1]))
            for s in sectors
            if isinstance(s.chamber, TorusChamber)
        }
        rep = min(tips)
        return ("pos", (rep.m, rep.n))
    if kind == "negative":
        us = {
            pm_representative(s.chamber.u)
            for s in sectors
            if isinstance(s.chamber, CylChamber)
        }
        return ("neg",) + tuple(sorted((u.m, u.n) for u in us))
    if kind == "arith_real":
        keys = [
            (s.chamber.k, s.chamber.l, s.chamber.sign, s.vertex[1])
            for s in sectors
            if isinstance(s.chamber, CylArithChamber)
        ]
        return ("arith", min(keys))
    if kind == "nonarith_real":
        keys = [
            ((s.chamber.u.m, s.chamber.u.n), s.vertex[1])
            for s in sectors
            if isinstance(s.chamber, CylChamber)
        ]
        return ("nonarith", min(keys))
    raise NotAVertex(f"no identifier scheme for kind {kind}")


def _collect_stars(atlas: Atlas) -> None:
    """Enumerate complete singular stars by walking from every germ once."""
    visited = set()
    stars = {}
    for g in atlas.gluings:
        seg = g.seg_a
        for v, direction in ((seg.lo, +1), (seg.hi, -1)):
            if v is None:
                continue
            germ = (seg.chamber, seg.part, v, direction)
            key = (seg.chamber, seg.part, _fe_key(v), direction)
            if key in visited:
                continue
            tag = None
            if (
                atlas.kind == "arith_real"
                and isinstance(seg.chamber, CylArithChamber)
                and seg.chamber.k == 1
                and v.is_zero()
            ):
                tag = "pinched_torus"
            try:
                star = _walk_star(atlas, germ, tag=tag)
            except _Unglued:
                continue
            except NotAVertex:
                continue
            for _germ, germ_key in _star_germs(atlas, germ):
                visited.add(germ_key)
            if tag == "pinched_torus":
                if atlas.center is None:
                    atlas.center = Singularity(
                        ident=("center",),
                        sectors=star.sectors,
                        total=star.total,
                        tag="pinched_torus",
                    )
                continue
            stars[star.ident] = star
    atlas.singularities = [stars[k] for k in sorted(stars)]


def _star_germs(atlas: Atlas, start, max_steps=64):
    """All incoming germs of a star walk, with their index keys."""
    out = []
    g_in = start
    for _ in range(max_steps):
        chamber, part, v, direction = g_in
        out.append((g_in, (chamber, part, _fe_key(v), direction)))
        g_out, _ = _other_germ(atlas, g_in)
        chamber, part, v, direction = g_out
        out.append((g_out, (chamber, part, _fe_key(v), direction)))
        g_in = _cross(atlas, g_out)
        if g_in == start:
            break
    return out


def singularity_star(atlas: Atlas, point) -> Singularity:
    """The singular star at a segmentation vertex.

    ``point`` is ``(chamber, coordinate)`` (for the torus chamber of a
    positive leaf, ``(chamber, (gamma, coordinate))`` names a slit tip).
    The arithmetic center returns its 2-pi pinched-torus record.

    Raises
    ------
    NotAVertex
        If the coordinate is not a segmentation vertex of the chamber.
    """
    chamber, coord = point
    if isinstance(chamber, TorusChamber):
        gamma, t = coord
        germ = (chamber, ("slit", gamma, "L"), _to_fe(atlas, t), +1)
    elif isinstance(chamber, DegChamber):
        part, s = coord
        germ = (chamber, part, _to_fe(atlas, s), +1 if s == 0 else -1)
    else:
        v = _to_fe(atlas, coord)
        germ = (chamber, ("line",), v, +1)
    tag = None
    if (
        atlas.kind == "arith_real"
        and isinstance(chamber, CylArithChamber)
        and chamber.k == 1
        and germ[2].is_zero()
    ):
        tag = "pinched_torus"
    try:
        star = _walk_star(atlas, germ, tag=tag)
    except _Unglued as e:
        raise NotAVertex(f"{point} is not an interior vertex of the atlas: {e}")
    if tag == "pinched_torus":
        return Singularity(("center",), star.sectors, star.total, tag=tag)
    return star


def _to_fe(atlas: Atlas, x) -> FieldElement:
    if isinstance(x, FieldElement):
        return x
    return atlas.field().element(x)


# ---------------------------------------------------------------------------
# verification operations


def connectivity_check(atlas: Atlas):
    """BFS over the chamber adjacency graph.

    Returns ``(connected, spanning_tree)`` where the tree is a list of
    ``(parent, child)`` chamber pairs in BFS discovery order.
    """
    adj = {}
    for c in atlas.chambers:
        adj[c] = set()
    for g in atlas.gluings:
        a, b = g.seg_a.chamber, g.seg_b.chamber
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    if not atlas.chambers:
        return True, []
    start = min(atlas.chambers, key=_chamber_key)
    seen = {start}
    tree = []
    frontier = [start]
    while frontier:
        nxt = []
        for c in frontier:
            for d in sorted(adj[c], key=_chamber_key):
                if d not in seen:
                    seen.add(d)
                    tree.append((c, d))
                    nxt.append(d)
        frontier = nxt
    return len(seen) == len(atlas.chambers), tree


def adjacency_graph(atlas: Atlas):
    """Nodes and unordered adjacency pairs of the chamber graph."""
    nodes = set(atlas.chambers)
    edges = set()
    for g in atlas.gluings:
        a, b = g.seg_a.chamber, g.seg_b.chamber
        if a != b:
            edges.add(frozenset((a, b)))
    return nodes, edges


def arithmetic_reachability(kmax: int):
    """Constructive descent from every admissible (k, l) to (1, 0).

    Each step replaces (K, L) by (L, -K mod L), which is linked to it by
    a family-2 wall record; the certificate lists the chain and the
    record parameters, and every link is re-verified through
    `glue_target`.
    """
    chains = {}
    for K, L in _admissible_pairs(kmax):
        chain = [(K, L)]
        k, l = K, L
        while (k, l) != (1, 0):
            k0, l0 = l, (-k) % l
            n = (k + l0) // l - 1
            lo = Fraction(-(n + 1) * k0 + l0)
            hi = Fraction(-n * k0 + l0)
            got = glue_target(k0, l0, +1, (lo, hi))
            assert got[0] == k and got[1] == l and got[2] == -1, (K, L, got)
            chain.append((k0, l0))
            k, l = k0, l0
        chains[(K, L)] = chain
    return chains


def wall_surface_match(atlas: Atlas, gluing: Gluing, t) -> bool:
    """Do the two chambers of a wall record degenerate to the same surface?

    Evaluates the boundary surface of both sides at matched coordinates
    (``t`` on the source, its gluing image on the target): the marked
    slit normal forms must be equal.

    Raises
    ------
    NotInterior
        If ``t`` is an endpoint of the glued segment.
    """
    t = _to_fe(atlas, t)
    seg = gluing.seg_a
    if (seg.lo is not None and (t - seg.lo).sign() <= 0) or (
        seg.hi is not None and (seg.hi - t).sign() <= 0
    ):
        raise NotInterior(f"{t} is not interior to {seg}")
    a, b = seg.chamber, gluing.seg_b.chamber
    t2 = gluing.map_coord(t)
    sa = cylinder_boundary_surface(a.k, a.l, a.sign, t.a)
    sb = cylinder_boundary_surface(b.k, b.l, b.sign, t2.a)
    if not isinstance(sa, SlitDegenerateSurface) or not isinstance(sb, SlitDegenerateSurface):
        return False
    return sa == sb


# ---------------------------------------------------------------------------
# the arithmetic wall tree


@dataclass
class WallTreeNode:
    """One unfolded wall edge: the wall record, its length, children."""

    record: Gluing
    length: Fraction
    far_vertex: tuple | None
    truncated: bool
    children: list


@dataclass
class WallTree:
    """The unfolded wall tree of an arithmetic atlas, rooted at the center.

    The root carries the two marked center walls; below, each complete
    singular vertex branches into one representative per remaining
    involution orbit of its incident walls (two of them), so interior
    branch vertices have degree three.  The folded (involution-quotient)
    graph is available as `quotient_edges`.
    """

    root: tuple
    branches: list
    quotient_edges: list


def _wall_orbit_key(g: Gluing):
    variants = [g, g.reverse(), _iota_image(g), _iota_image(g).reverse()]
    return min(v.key() for v in variants)


def _wall_endpoint_vertex(atlas: Atlas, g: Gluing, which: str):
    seg = g.seg_a
    v = seg.lo if which == "lo" else seg.hi
    germ = (seg.chamber, seg.part, v, +1 if which == "lo" else -1)
    ch = seg.chamber
    if ch.k == 1 and v.is_zero():
        return ("center",), False
    try:
        star = _walk_star(atlas, germ)
    except _Unglued:
        return None, True
    return star.ident, False


def wall_tree(atlas: Atlas) -> WallTree:
    """Unfold the wall set of an arithmetic atlas into its rooted tree."""
    if atlas.kind != "arith_real":
        raise WrongLeafKind("wall trees are defined for arithmetic atlases")
    # one marked wall per record pair: keep source = plus chamber
    marked = {}
    for g in atlas.gluings:
        if g.seg_a.chamber.sign == +1:
            marked[g.seg_a.key()] = g
    walls = list(marked.values())
    by_vertex = {}
    ends = {}
    for g in walls:
        pair = []
        for which in ("lo", "hi"):
            ident, trunc = _wall_endpoint_vertex(atlas, g, which)
            pair.append((ident, trunc))
            if ident is not None:
                by_vertex.setdefault(ident, []).append(g)
        ends[g.seg_a.key()] = pair

    def grow(g: Gluing, came_from: tuple, depth: int) -> WallTreeNode:
        (id_lo, tr_lo), (id_hi, tr_hi) = ends[g.seg_a.key()]
        if id_lo == came_from and id_hi != came_from:
            far, trunc = id_hi, tr_hi
        else:
            far, trunc = id_lo, tr_lo
        length = g.seg_a.hi.a - g.seg_a.lo.a
        node = WallTreeNode(
            record=g, length=length, far_vertex=far, truncated=trunc, children=[]
        )
        if trunc or far is None or far == ("center",) or depth <= 0:
            return node
        my_orbit = _wall_orbit_key(g)
        orbits = {}
        for h in by_vertex.get(far, []):
            orbits.setdefault(_wall_orbit_key(h), []).append(h)
        for key in sorted(orbits):
            if key == my_orbit:
                continue
            rep = min(orbits[key], key=lambda h: h.key())
            node.children.append(grow(rep, far, depth - 1))
        return node

    roots = [g for g in walls if ("center",) in [e[0] for e in ends[g.seg_a.key()]]]
    roots.sort(key=lambda g: g.key())
    branches = [grow(g, ("center",), depth=4 * atlas.bound + 8) for g in roots]
    quotient = sorted({_wall_orbit_key(g) for g in walls})
    return WallTree(root=("center",), branches=branches, quotient_edges=quotient)


# ---------------------------------------------------------------------------
# invariant suite


def check_atlas(atlas: Atlas, samples_per_gluing: int = 3) -> CheckReport:
    """Run the full invariant suite; failures carry exact counterexamples."""
    checks = []
    failures = []

    def run(name, fn):
        try:
            bad = fn()
        except Exception as e:  # a crash is a failure with its message
            bad = [{"error": repr(e)}]
        checks.append((name, not bad))
        for b in bad:
            failures.append({"check": name, **b})

    run("gluing-involution", lambda: _check_involution(atlas))
    run("segments-glued-once", lambda: _check_single_use(atlas))
    run("cone-angles", lambda: _check_cone_angles(atlas))
    if atlas.kind == "arith_real":
        run("wall-surface-match", lambda: _check_wall_match(atlas, samples_per_gluing))
        run("phi-count", lambda: _check_phi_count(atlas))
        run("involution-equivariance", lambda: _check_arith_involution(atlas))
    run("connectivity", lambda: _check_connectivity(atlas))
    return CheckReport(passed=not failures, checks=checks, failures=failures)


def _seg_desc(seg: BoundarySegment):
    return {
        "chamber": repr(seg.chamber),
        "part": repr(seg.part),
        "lo": repr(seg.lo),
        "hi": repr(seg.hi),
    }


def _check_involution(atlas: Atlas):
    keys = {g.key() for g in atlas.gluings}
    bad = []
    for g in atlas.gluings:
        if g.reverse().key() not in keys:
            bad.append({"missing-reverse-of": _seg_desc(g.seg_a)})
    return bad


def _check_single_use(atlas: Atlas):
    seen = {}
    bad = []
    for g in atlas.gluings:
        k = g.seg_a.key()
        if k in seen:
            bad.append({"segment-reused": _seg_desc(g.seg_a)})
        seen[k] = g
    return bad


def _check_cone_angles(atlas: Atlas):
    bad = []
    for s in atlas.singularities:
        if s.total != 6:
            bad.append({"singularity": repr(s.ident), "half_turns": s.total})
    if atlas.kind == "arith_real":
        if atlas.center is None or atlas.center.total != 2:
            bad.append({"center": "missing or wrong angle"})
    return bad


def _check_wall_match(atlas: Atlas, samples: int):
    bad = []
    for g in atlas.gluings:
        if g.seg_a.chamber.sign != +1:
            continue
        lo, hi = g.seg_a.lo.a, g.seg_a.hi.a
        for j in range(1, samples + 1):
            t = lo + (hi - lo) * Fraction(j, samples + 1)
            if not wall_surface_match(atlas, g, t):
                bad.append(
                    {"gluing": _seg_desc(g.seg_a), "sample": str(t)}
                )
    return bad


def _check_phi_count(atlas: Atlas):
    def phi(n):
        return sum(1 for j in range(1, n + 1) if gcd(j, n) == 1)

    bad = []
    counts = {}
    for c in atlas.chambers:
        counts.setdefault((c.k, c.sign), 0)
        counts[(c.k, c.sign)] += 1
    for k in range(1, atlas.bound + 1):
        for sign in (+1, -1):
            if counts.get((k, sign), 0) != phi(k):
                bad.append(
                    {"k": k, "sign": sign, "count": counts.get((k, sign), 0), "phi": phi(k)}
                )
    return bad


def _check_arith_involution(atlas: Atlas):
    keys = {g.key() for g in atlas.gluings}
    bad = []
    for g in atlas.gluings:
        if _iota_image(g).key() not in keys:
            bad.append({"missing-involution-image-of": _seg_desc(g.seg_a)})
    return bad


def _check_connectivity(atlas: Atlas):
    ok, _ = connectivity_check(atlas)
    return [] if ok else [{"connectivity": "chamber graph is disconnected"}]


# ---------------------------------------------------------------------------
# canonical JSON


_SCHEMA = "isoleaf-atlas/1"


def _fe_json(x: FieldElement | None):
    if x is None:
        return None
    return x.to_json()


def _chamber_json(c):
    if isinstance(c, TorusChamber):
        return {"type": "torus"}
    if isinstance(c, CylChamber):
        return {"type": "cyl", "u": [str(c.u.m), str(c.u.n)]}
    if isinstance(c, CylArithChamber):
        return {"type": "cyl_arith", "k": str(c.k), "l": str(c.l), "sign": c.sign}
    return {
        "type": "deg",
        "triple": [[str(e.m), str(e.n)] for e in c.triple.elements()],
    }


def _chamber_from_json(d):
    if d["type"] == "torus":
        return TorusChamber()
    if d["type"] == "cyl":
        return CylChamber(LatticeElement(int(d["u"][0]), int(d["u"][1])))
    if d["type"] == "cyl_arith":
        return CylArithChamber(int(d["k"]), int(d["l"]), int(d["sign"]))
    e = [LatticeElement(int(m), int(n)) for m, n in d["triple"]]
    return DegChamber(CharacteristicTriple.make(*e))


def _part_json(part):
    out = []
    for x in part:
        if isinstance(x, LatticeElement):
            out.append({"lat": [str(x.m), str(x.n)]})
        else:
            out.append(x)
    return out


def _part_from_json(data):
    out = []
    for x in data:
        if isinstance(x, dict):
            out.append(LatticeElement(int(x["lat"][0]), int(x["lat"][1])))
        else:
            out.append(x)
    return tuple(out)


def _seg_json(seg: BoundarySegment):
    return {
        "chamber": _chamber_json(seg.chamber),
        "part": _part_json(seg.part),
        "lo": _fe_json(seg.lo),
        "hi": _fe_json(seg.hi),
    }


def _seg_from_json(d, fld: GroundField):
    return BoundarySegment(
        _chamber_from_json(d["chamber"]),
        _part_from_json(d["part"]),
        None if d["lo"] is None else FieldElement.from_json(fld, d["lo"]),
        None if d["hi"] is None else FieldElement.from_json(fld, d["hi"]),
    )


def atlas_to_json_dict(atlas: Atlas) -> dict:
    """Canonical JSON form (deterministic ordering, exact coordinates)."""
    gluings = sorted(atlas.gluings, key=lambda g: g.key())
    sings = sorted(atlas.singularities, key=lambda s: s.ident)
    return {
        "schema": _SCHEMA,
        "kind": atlas.kind,
        "character": atlas.character.to_json_dict(),
        "bound": str(atlas.bound),
        "chambers": [_chamber_json(c) for c in sorted(atlas.chambers, key=_chamber_key)],
        "gluings": [
            {
                "a": _seg_json(g.seg_a),
                "b": _seg_json(g.seg_b),
                "sigma": g.sigma,
                "c": _fe_json(g.c),
            }
            for g in gluings
        ],
        "truncated": [_seg_json(s) for s in atlas.truncated],
        "singularities": [
            {
                "id": _ident_json(s.ident),
                "half_turns": s.total,
                "sectors": len(s.sectors),
            }
            for s in sings
        ],
        "center": None
        if atlas.center is None
        else {"half_turns": atlas.center.total, "tag": atlas.center.tag},
    }


def _ident_json(ident):
    def enc(x):
        if isinstance(x, tuple):
            return [enc(y) for y in x]
        if isinstance(x, Fraction):
            return f"{x.numerator}/{x.denominator}"
        return x

    return enc(ident)


def atlas_from_json_dict(data: dict) -> Atlas:
    """Rebuild an atlas from its canonical JSON (stars are re-derived)."""
    if data.get("schema") != _SCHEMA:
        raise IsoleafError(f"unknown atlas schema {data.get('schema')!r}")
    chi = PeriodCharacter.from_json_dict(data["character"])
    kind = data["kind"]
    fld = chi.field if kind == "nonarith_real" else GroundField.rational()
    chambers = [_chamber_from_json(c) for c in data["chambers"]]
    gluings = [
        Gluing(
            _seg_from_json(g["a"], fld),
            _seg_from_json(g["b"], fld),
            int(g["sigma"]),
            FieldElement.from_json(fld, g["c"]),
        )
        for g in data["gluings"]
    ]
    atlas = Atlas(
        kind=kind,
        character=chi,
        bound=int(data["bound"]),
        chambers=chambers,
        gluings=gluings,
        truncated=[_seg_from_json(s, fld) for s in data["truncated"]],
        singularities=[],
        complete={},
    )
    if kind == "positive":
        # stars of the positive atlas live at every enumerated tip pair
        reps = sorted(
            {
                pm_representative(c.u)
                for c in chambers
                if isinstance(c, CylChamber)
            },
            key=lambda u: (u.max_norm(), u.m, u.n),
        )
        Q = GroundField.rational()
        torus = TorusChamber()
        for rep in reps:
            start = (torus, ("slit", rep, "L"), Q.element(1), +1)
            atlas.singularities.append(
                _walk_star(atlas, start, ident=("pos", (rep.m, rep.n)))
            )
    else:
        _collect_stars(atlas)
    return atlas
