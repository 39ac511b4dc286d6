r"""Veech group descriptors of isoperiodic leaves.

A leaf whose period group spans the plane (positive or negative volume)
has Veech group a conjugate of SL(2, Z); the descriptor stores the
conjugating matrix.  A real leaf generically has the triangular group
``{±[[1, b], [0, a]] : a > 0}``.  The exception is a dense real period
group similar to ``t Z + (l + m γ) Z`` in a real quadratic field whose
unit group contributes hyperbolic elements: multiplication by a power
``ε^k`` of the fundamental unit preserves the period group exactly when

* ``N(ε^k) = 1``,
* ``m`` divides the γ-coefficient β of ``ε^k``, and
* ``t`` divides ``(β / m) · N(l + m γ)``,

and the descriptor records the smallest such ``k`` with its generator.
All three conditions depend only on ``ε^k`` modulo ``M = |t·m·N(l+mγ)|``
(plus the sign of the norm, which alternates), so searching one full
residue cycle of ``ε`` modulo ``M`` decides the group exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm

from isoleaf.period_algebra import (
    FieldElement,
    GroundField,
    IsoleafError,
    LeafKind,
    PeriodCharacter,
    _is_square_free,
    classify,
    normalize,
)

__all__ = [
    "NotSquareFree",
    "BadTriple",
    "ConjSL2Z",
    "TriangularV",
    "QuadraticV",
    "fundamental_unit",
    "quadratic_group",
    "quadratic_group_search",
    "module_triple",
    "module_matrix",
    "unit_power",
    "unit_norm",
    "gamma_element",
    "veech_group",
    "group_contains",
]


class NotSquareFree(IsoleafError):
    """Raised when a discriminant is not a square-free integer >= 2."""


class BadTriple(IsoleafError):
    """Raised when a module triple (t, l, m) is degenerate or imprimitive."""


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class ConjSL2Z:
    """A conjugate M SL(2,Z) M^-1 of the integral symplectic group."""

    conjugator: tuple

    def to_json_dict(self) -> dict:
        return {
            "variant": "conj_sl2z",
            "conjugator": [[_frac_str(x) for x in row] for row in self.conjugator],
        }


@dataclass(frozen=True)
class TriangularV:
    """The triangular group {±[[1, b], [0, a]] : a > 0}."""

    def to_json_dict(self) -> dict:
        return {"variant": "triangular"}


@dataclass(frozen=True)
class QuadraticV:
    """Triangular group extended by the hyperbolic generator ε^k.

    ``generator = (α, β)`` are the coordinates of ``ε^k = α + β γ`` in
    the ring basis; ``matrix`` is its action on the period module basis
    ``(t, l + m γ)``, an integral matrix of determinant one.
    """

    D: int
    tau: tuple
    generator: tuple
    exponent: int

    @property
    def matrix(self) -> tuple:
        return module_matrix(self.D, self.tau, self.generator)

    def to_json_dict(self) -> dict:
        return {
            "variant": "quadratic",
            "D": str(self.D),
            "tau": [str(x) for x in self.tau],
            "generator": [str(x) for x in self.generator],
            "exponent": str(self.exponent),
            "matrix": [[_frac_str(x) for x in row] for row in self.matrix],
        }


def _frac_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


# ---------------------------------------------------------------------------
# ring arithmetic in Z[gamma]
#
# gamma = sqrt(D) when D % 4 != 1, else (1 + sqrt(D)) / 2, so that
# gamma^2 = D, respectively gamma^2 = gamma + (D - 1) / 4.


def _check_D(D: int) -> None:
    if not isinstance(D, int) or D < 2 or not _is_square_free(D):
        raise NotSquareFree(f"D = {D!r} is not a square-free integer >= 2")


def unit_norm(D: int, u: tuple) -> int:
    """The field norm of alpha + beta*gamma."""
    a, b = u
    if D % 4 == 1:
        return a * a + a * b - b * b * ((D - 1) // 4)
    return a * a - D * b * b


def _ring_mul(D: int, u: tuple, v: tuple, mod: int | None = None) -> tuple:
    a1, b1 = u
    a2, b2 = v
    if D % 4 == 1:
        c = (D - 1) // 4
        a = a1 * a2 + b1 * b2 * c
        b = a1 * b2 + a2 * b1 + b1 * b2
    else:
        a = a1 * a2 + D * b1 * b2
        b = a1 * b2 + a2 * b1
    if mod is not None:
        return (a % mod, b % mod)
    return (a, b)


def unit_power(D: int, u: tuple, k: int) -> tuple:
    """Exact k-th power of alpha + beta*gamma (k >= 0)."""
    out = (1, 0)
    base = u
    while k:
        if k & 1:
            out = _ring_mul(D, out, base)
        base = _ring_mul(D, base, base)
        k >>= 1
    return out


def gamma_element(F: GroundField) -> FieldElement:
    """The ring generator gamma as an element of the quadratic field."""
    if F.D % 4 == 1:
        return F.element(Fraction(1, 2), Fraction(1, 2))
    return F.symbol()


# ---------------------------------------------------------------------------
# fundamental units


def fundamental_unit(D: int) -> tuple:
    """The smallest unit > 1 of Z[gamma], as coordinates (alpha, beta).

    Found from the continued-fraction expansion of gamma; for D <= 100
    the result is re-verified against a direct minimal-beta search.

    Raises
    ------
    NotSquareFree
        If D is not a square-free integer >= 2.
    """
    _check_D(D)
    unit = _cf_unit(D)
    if D <= 100:
        brute = _brute_unit(D)
        if unit != brute:
            raise IsoleafError(
                f"unit search mismatch for D={D}: cf {unit} vs direct {brute}"
            )
    return unit


def _cf_unit(D: int) -> tuple:
    # continued fraction of gamma = (P0 + sqrt(D)) / Q0
    if D % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1

    def step_floor(P: int, Q: int) -> int:
        v = (P + isqrt(D)) // Q
        while (v + 1) * Q - P <= 0 or ((v + 1) * Q - P) ** 2 <= D:
            v += 1
        while v * Q - P > 0 and (v * Q - P) ** 2 > D:
            v -= 1
        return v

    h_prev, k_prev = 1, 0
    a = step_floor(P, Q)
    h, k = a, 1
    for _ in range(10**6):
        if D % 4 == 1:
            cand = (h - k, k)
        else:
            cand = (h, k)
        if k >= 1 and abs(unit_norm(D, cand)) == 1:
            return cand
        P = a * Q - P
        Q = (D - P * P) // Q
        a = step_floor(P, Q)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    raise IsoleafError(f"continued fraction for D={D} did not produce a unit")


def _brute_unit(D: int) -> tuple:
    # smallest unit > 1 has the smallest positive gamma-coefficient
    for beta in range(1, 10**7):
        if D % 4 == 1:
            # (2 alpha + beta)^2 = D beta^2 -+ 4
            for sign in (-4, 4):
                s2 = D * beta * beta + sign
                if s2 <= 0:
                    continue
                s = isqrt(s2)
                if s * s == s2 and (s - beta) % 2 == 0:
                    alpha = (s - beta) // 2
                    return (alpha, beta)
        else:
            for sign in (-1, 1):
                s2 = D * beta * beta + sign
                if s2 <= 0:
                    continue
                s = isqrt(s2)
                if s * s == s2:
                    return (s, beta)
    raise IsoleafError(f"no unit found for D={D}")


# ---------------------------------------------------------------------------
# the quadratic-module group


def _check_triple(t: int, l: int, m: int) -> None:
    if t == 0 or m == 0:
        raise BadTriple(f"(t, l, m) = {(t, l, m)} needs t != 0 and m != 0")
    if gcd(t, gcd(l, m)) != 1:
        raise BadTriple(f"(t, l, m) = {(t, l, m)} is not primitive")


@dataclass(frozen=True)
class QuadraticSearch:
    """Result of one residue-cycle search, with its certificate.

    ``exponent`` is None exactly when no power of the fundamental unit
    preserves the module; then ``cycle`` lists the full residue cycle of
    ε modulo M, which proves the search exhaustive.
    """

    D: int
    tau: tuple
    exponent: int | None
    generator: tuple | None
    modulus: int
    cycle: tuple


def quadratic_group_search(D: int, t: int, l: int, m: int) -> QuadraticSearch:
    """Search the residue cycle of the fundamental unit for the module group."""
    _check_D(D)
    _check_triple(t, l, m)
    eps = fundamental_unit(D)
    n_eps = unit_norm(D, eps)
    NL = unit_norm(D, (l, m))
    M = abs(t * m * NL)
    cur = (1 % M, 0)
    cycle = []
    j = 0
    # one full multiplicative cycle of eps mod M decides every condition;
    # run two cycles so the norm-sign parity is covered when N(eps) = -1
    limit = 2 * max(M * M, 1) + 2
    while j < limit:
        j += 1
        cur = _ring_mul(D, cur, eps, mod=M)
        cycle.append(cur)
        # the conditions factor through beta mod M: |m| divides M, and
        # changing beta by a multiple of M changes (beta/m)*NL by a
        # multiple of t*NL^2
        norm_ok = n_eps == 1 or j % 2 == 0
        if norm_ok and cur[1] % abs(m) == 0:
            q = cur[1] // abs(m)
            if (q * NL) % abs(t) == 0:
                return QuadraticSearch(
                    D=D,
                    tau=(t, l, m),
                    exponent=j,
                    generator=unit_power(D, eps, j),
                    modulus=M,
                    cycle=tuple(cycle),
                )
        if cur == (1 % M, 0) and (n_eps == 1 or j % 2 == 0):
            break
    return QuadraticSearch(
        D=D, tau=(t, l, m), exponent=None, generator=None, modulus=M, cycle=tuple(cycle)
    )


def quadratic_group(D: int, t: int, l: int, m: int) -> int | None:
    """Smallest k >= 1 with ε^k preserving t Z + (l + m γ) Z, else None.

    Raises
    ------
    BadTriple
        If t or m vanishes or gcd(t, l, m) != 1.
    """
    return quadratic_group_search(D, t, l, m).exponent


def module_triple(theta: FieldElement) -> tuple:
    """Canonical (t, l, m) with Z + theta Z similar to t Z + (l + m γ) Z.

    Canonical means gcd(t, l, m) = 1, m > 0 and 0 <= l < t.
    """
    if theta.field.tag != "quadratic" or theta.b == 0:
        raise BadTriple(f"theta = {theta} is not a quadratic irrational")
    D = theta.field.D
    a, b = theta.a, theta.b
    if D % 4 == 1:
        x, y = a - b, 2 * b
    else:
        x, y = a, b
    t = lcm(x.denominator, y.denominator)
    l = int(x * t)
    m = int(y * t)
    g = gcd(t, gcd(l, m))
    t, l, m = t // g, l // g, m // g
    if m < 0:
        l, m = -l, -m
    l %= t
    return (t, l, m)


def module_matrix(D: int, tau: tuple, eta: tuple) -> tuple:
    """Matrix of multiplication by α + β γ on the basis (t, l + m γ).

    Entries are exact rationals; they are integers exactly when the
    divisibility conditions hold, and the determinant equals N(η).
    """
    _check_D(D)
    t, l, m = tau
    alpha, beta = eta
    NL = unit_norm(D, (l, m))
    x11 = Fraction(alpha) - Fraction(beta * l, m)
    x21 = Fraction(t * beta, m)
    if D % 4 == 1:
        x22 = Fraction(alpha) + Fraction(beta * (l + m), m)
    else:
        x22 = Fraction(alpha) + Fraction(beta * l, m)
    x12 = Fraction(-beta * NL, m * t)
    return ((x11, x12), (x21, x22))


# ---------------------------------------------------------------------------
# the leaf-level descriptor


def veech_group(chi: PeriodCharacter):
    """The Veech group descriptor of the leaf of ``chi``.

    Positive or negative leaves give a conjugate of SL(2, Z) by the
    real matrix with columns the two periods.  Real leaves give the
    triangular group, extended to a quadratic descriptor when the
    period module has a hyperbolic unit stabilizer.
    """
    kind = classify(chi)
    if kind.kind in (LeafKind.POSITIVE, LeafKind.NEGATIVE):
        g1, g2 = chi.g1, chi.g2
        conj = (
            (g1.a, g2.a),
            (g1.b, g2.b),
        )
        return ConjSL2Z(conjugator=conj)
    if kind.kind == LeafKind.ARITH_REAL:
        return TriangularV()
    theta = normalize(chi).character.g2
    tau = module_triple(theta)
    D = theta.field.D
    found = quadratic_group_search(D, *tau)
    if found.exponent is None:
        return TriangularV()
    return QuadraticV(D=D, tau=tau, generator=found.generator, exponent=found.exponent)


def _mat_mul(A, B):
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2))
        for i in range(2)
    )


def _mat_det(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def _mat_inv(A):
    d = _mat_det(A)
    if d == 0:
        raise IsoleafError("conjugator is singular")
    return (
        (A[1][1] / d, -A[0][1] / d),
        (-A[1][0] / d, A[0][0] / d),
    )


def _as_frac_matrix(A):
    return tuple(tuple(Fraction(x) for x in row) for row in A)


def group_contains(descriptor, matrix) -> bool:
    """Exact membership of a rational 2x2 matrix in the described group."""
    A = _as_frac_matrix(matrix)
    if isinstance(descriptor, ConjSL2Z):
        M = _as_frac_matrix(descriptor.conjugator)
        B = _mat_mul(_mat_mul(_mat_inv(M), A), M)
        return (
            all(x.denominator == 1 for row in B for x in row) and _mat_det(B) == 1
        )
    if isinstance(descriptor, TriangularV):
        s = A[0][0]
        return s in (1, -1) and A[1][0] == 0 and s * A[1][1] > 0
    if isinstance(descriptor, QuadraticV):
        if _mat_det(A) != 1:
            return False
        if all(x.denominator == 1 for row in A for x in row):
            G = _as_frac_matrix(descriptor.matrix)
            for base in (G, _mat_inv(G)):
                P = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
                for _ in range(512):
                    if P == A or _mat_mul(((Fraction(-1), Fraction(0)), (Fraction(0), Fraction(-1))), P) == A:
                        return True
                    if max(abs(x) for row in P for x in row) > 4 * max(
                        1, max(abs(x) for row in A for x in row)
                    ):
                        break
                    P = _mat_mul(P, base)
        return False
    raise IsoleafError(f"unknown descriptor {descriptor!r}")
