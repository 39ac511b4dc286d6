r"""Exact arithmetic on period characters of genus-one 1-forms.

A *period character* is a pair :math:`\chi = (g_1, g_2)` of complex numbers,
the images of a symplectic homology basis under integration of a meromorphic
1-form with two simple zeros and one double pole on an elliptic curve.  The
subgroup :math:`\Gamma = \mathbb{Z} g_1 + \mathbb{Z} g_2` of
:math:`(\mathbb{C}, +)` is the group of absolute periods.

All arithmetic here is exact.  Characters live in one of three computable
ground fields:

* ``gaussian``   -- :math:`\mathbb{Q}(i)`, elements ``a + b*i`` with
  rational ``a, b`` (the only field with non-real elements);
* ``quadratic``  -- the real field :math:`\mathbb{Q}(\sqrt{D})` for a
  square-free integer ``D >= 2``;
* ``rational``   -- :math:`\mathbb{Q}`.

The sign of a real element, hence every comparison, is decided exactly.

The key derived quantity is the volume
:math:`\mathrm{Vol}(\chi) = \mathrm{Im}(\overline{g_1}\, g_2)`, which
separates the four kinds of isoperiodic leaves:

* ``positive``      -- Vol > 0;
* ``negative``      -- Vol < 0;
* ``arith_real``    -- Vol = 0 and :math:`\Gamma` is cyclic, generated by
  one element ``a``;
* ``nonarith_real`` -- Vol = 0 and :math:`\Gamma \cong \mathbb{Z} +
  \theta\mathbb{Z}` is dense on a line, with irrational quadratic
  :math:`\theta`.

`normalize` reduces a character to the standard model of its kind
(``(1, i)``, ``(1, -i)``, ``(1, 0)``, or ``(1, theta)`` with
``theta in (0, 1)``) and records both the orientation-preserving real-linear
map and the integral basis change that achieve the reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

__all__ = [
    "IsoleafError",
    "TrivialCharacter",
    "ZeroElement",
    "WrongLeafKind",
    "NotSymplectic",
    "FieldMismatch",
    "GroundField",
    "FieldElement",
    "PeriodCharacter",
    "LeafKind",
    "LatticeElement",
    "CharacteristicTriple",
    "NormalizedCharacter",
    "volume",
    "classify",
    "is_primitive",
    "enumerate_triples",
    "change_basis",
    "normalize",
    "mat2_det",
    "mat2_mul",
    "symplectic_partner",
    "pm_representative",
]


# ---------------------------------------------------------------------------
# errors


class IsoleafError(Exception):
    """Base class for all errors raised by this package."""


class TrivialCharacter(IsoleafError):
    """Raised for the character (0, 0), whose leaf is not defined."""


class ZeroElement(IsoleafError):
    """Raised when the zero lattice element is used where a direction is needed."""


class WrongLeafKind(IsoleafError):
    """Raised when an operation is applied to a character of the wrong kind."""


class NotSymplectic(IsoleafError):
    """Raised for basis changes whose matrix does not have determinant one."""


class FieldMismatch(IsoleafError):
    """Raised when exact numbers from different ground fields are combined."""


# ---------------------------------------------------------------------------
# ground fields and their elements


def _is_square_free(n: int) -> bool:
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


@dataclass(frozen=True)
class GroundField:
    """A computable ground field: Q, Q(i), or a real quadratic field.

    Attributes
    ----------
    tag : str
        One of ``"rational"``, ``"gaussian"``, ``"quadratic"``.
    D : int or None
        The radicand for ``"quadratic"`` fields; ``None`` otherwise.
    """

    tag: str
    D: int | None = None

    def __post_init__(self) -> None:
        if self.tag not in ("rational", "gaussian", "quadratic"):
            raise ValueError(f"unknown ground field tag {self.tag!r}")
        if self.tag == "quadratic":
            if self.D is None or self.D < 2 or not _is_square_free(self.D):
                raise ValueError("quadratic fields need a square-free D >= 2")
        elif self.D is not None:
            raise ValueError(f"field {self.tag!r} takes no radicand")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational() -> "GroundField":
        return GroundField("rational")

    @staticmethod
    def gaussian() -> "GroundField":
        return GroundField("gaussian")

    @staticmethod
    def quadratic(D: int) -> "GroundField":
        return GroundField("quadratic", D)

    # -- structure ---------------------------------------------------------

    @property
    def symbol_square(self) -> int | None:
        """Square of the adjoined symbol: -1, D, or None for Q."""
        if self.tag == "gaussian":
            return -1
        return self.D

    @property
    def is_real(self) -> bool:
        """Whether the field embeds in the real numbers."""
        return self.tag != "gaussian"

    def element(self, a, b=0) -> "FieldElement":
        """Build the element ``a + b*symbol`` of this field."""
        a = Fraction(a)
        b = Fraction(b)
        if self.tag == "rational" and b != 0:
            raise ValueError("the rational field has no adjoined symbol")
        return FieldElement(self, a, b)

    def zero(self) -> "FieldElement":
        return self.element(0)

    def one(self) -> "FieldElement":
        return self.element(1)

    def symbol(self) -> "FieldElement":
        """The adjoined symbol i or sqrt(D); errors for Q."""
        if self.tag == "rational":
            raise ValueError("the rational field has no adjoined symbol")
        return self.element(0, 1)


@dataclass(frozen=True)
class FieldElement:
    """An exact number ``a + b*w`` where ``w in {i, sqrt(D)}`` (or ``b = 0``).

    Supports ring operations, exact division, complex and Galois
    conjugation, and -- in the real fields -- exact sign and total order.
    Integers and :class:`~fractions.Fraction` values coerce automatically.
    """

    field: GroundField
    a: Fraction
    b: Fraction

    # -- helpers -----------------------------------------------------------

    def _coerce(self, other) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                if other.b == 0:
                    return FieldElement(self.field, other.a, Fraction(0))
                if self.b == 0:
                    # handled by reflected operation on the other element
                    raise FieldMismatch(
                        f"cannot mix {self.field.tag} and {other.field.tag} elements"
                    )
                raise FieldMismatch(
                    f"cannot mix {self.field.tag} and {other.field.tag} elements"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, Fraction(other), Fraction(0))
        return None

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        w2 = self.field.symbol_square
        if w2 is None:
            return FieldElement(self.field, self.a * o.a, Fraction(0))
        return FieldElement(
            self.field,
            self.a * o.a + w2 * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero field element")
        g = self.galois_conjugate()
        return FieldElement(self.field, g.a / n, g.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- conjugation, norm, parts ------------------------------------------

    def conjugate(self) -> "FieldElement":
        """Complex conjugate (negates ``b`` only in the Gaussian field)."""
        if self.field.tag == "gaussian":
            return FieldElement(self.field, self.a, -self.b)
        return self

    def galois_conjugate(self) -> "FieldElement":
        """The conjugate ``a - b*w`` over Q."""
        return FieldElement(self.field, self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm ``(a + b*w)(a - b*w)`` as a rational number."""
        w2 = self.field.symbol_square
        if w2 is None:
            return self.a * self.a
        return self.a * self.a - w2 * self.b * self.b

    def imag_fraction(self) -> Fraction:
        """Imaginary part of the complex embedding; exact, often 0."""
        if self.field.tag == "gaussian":
            return self.b
        return Fraction(0)

    def real_embedding_fraction_bounds(self) -> tuple[Fraction, Fraction]:
        """Exact rational lower/upper bounds for a real element."""
        if self.field.tag == "gaussian":
            raise ValueError("gaussian elements are not real")
        if self.field.tag == "rational" or self.b == 0:
            return self.a, self.a
        D = self.field.D
        # b*sqrt(D) bracketed by scaled integer square roots
        scale = 10**12
        num = self.b.numerator * self.b.numerator * D * scale * scale
        den = self.b.denominator * self.b.denominator
        root = isqrt(num // den)
        lo = Fraction(root, scale)
        hi = Fraction(root + 1, scale)
        if self.b > 0:
            return self.a + lo, self.a + hi
        return self.a - hi, self.a - lo

    # -- order and sign ----------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def sign(self) -> int:
        """Exact sign of a real element; errors in the Gaussian field."""
        if not self.field.is_real:
            raise ValueError("gaussian elements have no sign")
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # mixed signs: compare a^2 with D b^2 (equality impossible, D square-free)
        D = self.field.D
        if a * a > D * b * b:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare FieldElement with {type(other)!r}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def floor(self) -> int:
        """Exact floor of a real element."""
        if not self.field.is_real:
            raise ValueError("gaussian elements have no floor")
        lo, hi = self.real_embedding_fraction_bounds()
        n = lo.numerator // lo.denominator
        while self._cmp(n + 1) >= 0:
            n += 1
        while self._cmp(n) < 0:
            n -= 1
        return n

    # -- embeddings --------------------------------------------------------

    def __complex__(self) -> complex:
        w2 = self.field.symbol_square
        if w2 is None:
            return complex(self.a)
        if w2 == -1:
            return complex(self.a) + 1j * float(self.b)
        return complex(float(self.a) + float(self.b) * (w2**0.5))

    def __float__(self) -> float:
        if not self.field.is_real:
            raise ValueError("gaussian elements are not real")
        return complex(self).real

    def __repr__(self) -> str:
        if self.field.tag == "rational" or self.b == 0:
            return f"{self.a}"
        sym = "i" if self.field.tag == "gaussian" else f"sqrt({self.field.D})"
        if self.a == 0:
            return f"{self.b}*{sym}"
        op = "+" if self.b > 0 else "-"
        return f"{self.a} {op} {abs(self.b)}*{sym}"

    # -- serialization -----------------------------------------------------

    def coords(self) -> list[Fraction]:
        """Coordinates over Q: one for rational, two otherwise."""
        if self.field.tag == "rational":
            return [self.a]
        return [self.a, self.b]

    def to_json(self) -> list[list[str]]:
        return [[str(c.numerator), str(c.denominator)] for c in self.coords()]

    @staticmethod
    def from_json(field: GroundField, data) -> "FieldElement":
        coords = [Fraction(int(num), int(den)) for num, den in data]
        if field.tag == "rational":
            (a,) = coords
            return field.element(a)
        a, b = coords
        return field.element(a, b)


# ---------------------------------------------------------------------------
# 2x2 integer matrix helpers (rows-of-tuples convention)


Mat2 = tuple[tuple[int, int], tuple[int, int]]


def mat2_det(A: Mat2) -> int:
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def mat2_mul(A: Mat2, B: Mat2):
    return (
        (
            A[0][0] * B[0][0] + A[0][1] * B[1][0],
            A[0][0] * B[0][1] + A[0][1] * B[1][1],
        ),
        (
            A[1][0] * B[0][0] + A[1][1] * B[1][0],
            A[1][0] * B[0][1] + A[1][1] * B[1][1],
        ),
    )


# ---------------------------------------------------------------------------
# lattice elements


@dataclass(frozen=True, order=True)
class LatticeElement:
    """Integer coordinates ``(m, n)`` of the period ``m*g1 + n*g2``."""

    m: int
    n: int

    def __neg__(self) -> "LatticeElement":
        return LatticeElement(-self.m, -self.n)

    def __add__(self, other: "LatticeElement") -> "LatticeElement":
        return LatticeElement(self.m + other.m, self.n + other.n)

    def __sub__(self, other: "LatticeElement") -> "LatticeElement":
        return LatticeElement(self.m - other.m, self.n - other.n)

    def scale(self, k: int) -> "LatticeElement":
        return LatticeElement(k * self.m, k * self.n)

    def det(self, other: "LatticeElement") -> int:
        """Determinant of the 2x2 matrix with rows self, other."""
        return self.m * other.n - self.n * other.m

    def is_zero(self) -> bool:
        return self.m == 0 and self.n == 0

    def max_norm(self) -> int:
        return max(abs(self.m), abs(self.n))


def is_primitive(u: LatticeElement) -> bool:
    """Whether ``u`` generates a maximal cyclic subgroup of the lattice.

    Raises
    ------
    ZeroElement
        If ``u`` is the zero element, which has no direction.
    """
    if u.is_zero():
        raise ZeroElement("the zero lattice element is neither primitive nor not")
    return gcd(u.m, u.n) == 1


def pm_representative(u: LatticeElement) -> LatticeElement:
    """Canonical representative of the pair ``{u, -u}``.

    The representative has positive first nonzero coordinate.
    """
    if u.m > 0 or (u.m == 0 and u.n > 0):
        return u
    return -u


def symplectic_partner(u: LatticeElement) -> LatticeElement:
    """A canonical ``v`` with ``det(u, v) = 1``, of minimal Euclidean norm.

    Raises
    ------
    ZeroElement
        If ``u`` is zero.
    ValueError
        If ``u`` is not primitive (no partner exists).
    """
    if u.is_zero():
        raise ZeroElement("the zero element has no symplectic partner")
    m, n = u.m, u.n
    if gcd(m, n) != 1:
        raise ValueError(f"{u!r} is imprimitive and has no symplectic partner")
    # extended gcd: x*m + y*n == 1, then v0 = (-y, x) gives det(u, v0) == 1
    x0, y0, x1, y1 = 1, 0, 0, 1
    a, b = m, n
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a == -1:
        x0, y0 = -x0, -y0
    v0 = LatticeElement(-y0, x0)
    # minimize |v0 + k u| over integers k (projection, rounded half-up)
    t = Fraction(-(v0.m * m + v0.n * n), m * m + n * n)
    k = (t + Fraction(1, 2)).numerator // (t + Fraction(1, 2)).denominator
    best = LatticeElement(v0.m + k * m, v0.n + k * n)
    for kk in (k - 1, k + 1):
        cand = LatticeElement(v0.m + kk * m, v0.n + kk * n)
        if (cand.m**2 + cand.n**2, cand.m, cand.n) < (
            best.m**2 + best.n**2,
            best.m,
            best.n,
        ):
            best = cand
    return best


# ---------------------------------------------------------------------------
# leaf kinds


@dataclass(frozen=True)
class LeafKind:
    """The kind of an isoperiodic leaf, with its normal-form data.

    Attributes
    ----------
    kind : str
        ``"positive"``, ``"negative"``, ``"arith_real"``, or
        ``"nonarith_real"``.
    generator : FieldElement, optional
        For ``arith_real``: the canonical primitive generator of the
        period group.
    theta : FieldElement, optional
        For ``nonarith_real``: the irrational slope of the normal form
        ``(1, theta)`` with ``theta in (0, 1)``.
    """

    kind: str
    generator: FieldElement | None = None
    theta: FieldElement | None = None

    POSITIVE = "positive"
    NEGATIVE = "negative"
    ARITH_REAL = "arith_real"
    NONARITH_REAL = "nonarith_real"

    @property
    def is_positive(self) -> bool:
        return self.kind == self.POSITIVE

    @property
    def is_negative(self) -> bool:
        return self.kind == self.NEGATIVE

    @property
    def is_arithmetic(self) -> bool:
        return self.kind == self.ARITH_REAL

    @property
    def is_nonarithmetic(self) -> bool:
        return self.kind == self.NONARITH_REAL


# ---------------------------------------------------------------------------
# period characters


@dataclass(frozen=True)
class PeriodCharacter:
    """An exact period character ``(g1, g2)`` over a computable field.

    Raises
    ------
    TrivialCharacter
        If both periods vanish.
    FieldMismatch
        If the two periods live in different fields.
    """

    field: GroundField
    g1: FieldElement
    g2: FieldElement

    def __post_init__(self) -> None:
        if self.g1.field != self.field or self.g2.field != self.field:
            raise FieldMismatch("periods must belong to the declared field")
        if self.g1.is_zero() and self.g2.is_zero():
            raise TrivialCharacter("the character (0, 0) has no leaf")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def gaussian(g1, g2) -> "PeriodCharacter":
        """Build a Gaussian character from ``(re, im)`` rational pairs."""
        F = GroundField.gaussian()
        return PeriodCharacter(F, F.element(*_pair(g1)), F.element(*_pair(g2)))

    @staticmethod
    def rational(g1, g2) -> "PeriodCharacter":
        F = GroundField.rational()
        return PeriodCharacter(F, F.element(g1), F.element(g2))

    @staticmethod
    def quadratic(D: int, g1, g2) -> "PeriodCharacter":
        """Build a real quadratic character from ``(a, b)`` pairs."""
        F = GroundField.quadratic(D)
        return PeriodCharacter(F, F.element(*_pair(g1)), F.element(*_pair(g2)))

    # -- basic data --------------------------------------------------------

    def volume(self) -> Fraction:
        """The exact volume ``Im(conj(g1) * g2)``."""
        return (self.g1.conjugate() * self.g2).imag_fraction()

    def lattice_value(self, u: LatticeElement) -> FieldElement:
        """The period ``m*g1 + n*g2`` of a lattice element."""
        return u.m * self.g1 + u.n * self.g2

    def classify(self) -> LeafKind:
        return classify(self)

    def change_basis(self, A: Mat2) -> "PeriodCharacter":
        return change_basis(self, A)

    def normalize(self) -> "NormalizedCharacter":
        return normalize(self)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        out: dict = {"field": self.field.tag}
        if self.field.tag == "quadratic":
            out["D"] = str(self.field.D)
        out["g1"] = self.g1.to_json()
        out["g2"] = self.g2.to_json()
        return out

    @staticmethod
    def from_json_dict(data: dict) -> "PeriodCharacter":
        tag = data["field"]
        if tag == "quadratic":
            field = GroundField.quadratic(int(data["D"]))
        elif tag == "gaussian":
            field = GroundField.gaussian()
        else:
            field = GroundField.rational()
        g1 = FieldElement.from_json(field, data["g1"])
        g2 = FieldElement.from_json(field, data["g2"])
        return PeriodCharacter(field, g1, g2)


def _pair(value) -> tuple:
    if isinstance(value, (tuple, list)):
        return tuple(value)
    return (value, 0)


# ---------------------------------------------------------------------------
# the classifier


def volume(chi: PeriodCharacter) -> Fraction:
    """Exact volume ``Im(conj(g1) * g2)`` of a character."""
    return chi.volume()


def _ratio_as_fraction(chi: PeriodCharacter) -> Fraction | None:
    """``g2/g1`` as a rational number, or ``None`` if irrational."""
    if chi.g1.is_zero():
        return None
    r = chi.g2 / chi.g1
    if r.b == 0:
        return r.a
    return None


def classify(chi: PeriodCharacter) -> LeafKind:
    """Classify the isoperiodic leaf of a character.

    Returns
    -------
    LeafKind
        ``positive``/``negative`` by the sign of the volume; among the
        volume-zero characters, ``arith_real`` when the period group is
        cyclic (carrying its canonical generator) and ``nonarith_real``
        when it is dense on a line (carrying the slope of the
        ``(1, theta)`` normal form).

    Raises
    ------
    TrivialCharacter
        If both periods vanish (already rejected at construction).
    """
    vol = chi.volume()
    if vol > 0:
        return LeafKind(LeafKind.POSITIVE)
    if vol < 0:
        return LeafKind(LeafKind.NEGATIVE)
    # volume zero: the periods are real-collinear
    if chi.g1.is_zero():
        return LeafKind(LeafKind.ARITH_REAL, generator=_canonical_generator(chi.g2))
    if chi.g2.is_zero():
        return LeafKind(LeafKind.ARITH_REAL, generator=_canonical_generator(chi.g1))
    ratio = _ratio_as_fraction(chi)
    if ratio is not None:
        # Z g1 + Z g2 = (g1 / q) Z for g2/g1 = p/q in lowest terms
        a = chi.g1 / ratio.denominator
        return LeafKind(LeafKind.ARITH_REAL, generator=_canonical_generator(a))
    theta = chi.g2 / chi.g1
    theta = theta - theta.floor()
    return LeafKind(LeafKind.NONARITH_REAL, theta=theta)


def _canonical_generator(a: FieldElement) -> FieldElement:
    """Fix the sign of a period-group generator deterministically."""
    if a.field.is_real:
        return a if a.sign() > 0 else -a
    if a.a > 0 or (a.a == 0 and a.b > 0):
        return a
    return -a


# ---------------------------------------------------------------------------
# basis changes and normalization


def change_basis(chi: PeriodCharacter, A: Mat2) -> PeriodCharacter:
    """Apply an integral symplectic basis change ``(g1, g2) -> (g1, g2) A``.

    The new periods are ``(a*g1 + c*g2, b*g1 + d*g2)`` for
    ``A = ((a, b), (c, d))``.

    Raises
    ------
    NotSymplectic
        If ``det A != 1``.
    """
    if mat2_det(A) != 1:
        raise NotSymplectic(f"matrix {A} has determinant {mat2_det(A)}, not 1")
    (a, b), (c, d) = A
    return PeriodCharacter(chi.field, a * chi.g1 + c * chi.g2, b * chi.g1 + d * chi.g2)


@dataclass(frozen=True)
class NormalizedCharacter:
    """A character in normal form, with the maps that got it there.

    Attributes
    ----------
    kind : LeafKind
        Kind of the original character.
    character : PeriodCharacter
        The normal form: ``(1, i)``, ``(1, -i)``, ``(1, 0)``, or
        ``(1, theta)``.
    matrix : tuple
        Rows of the orientation-preserving real-linear map of the plane
        (exact entries) that rescales periods to the normal form.
    basis_change : Mat2
        The determinant-one integral matrix applied to the basis after
        rescaling.
    original : PeriodCharacter
        The input character.
    """

    kind: LeafKind
    character: PeriodCharacter
    matrix: tuple
    basis_change: Mat2
    original: PeriodCharacter


def _complex_mult_matrix(c: FieldElement) -> tuple:
    """Real 2x2 matrix of multiplication by a Gaussian number."""
    F = c.field
    return ((F.element(c.a), F.element(-c.b)), (F.element(c.b), F.element(c.a)))


def _real_scale_matrix(c: FieldElement) -> tuple:
    return ((c, c.field.zero()), (c.field.zero(), c))


def normalize(chi: PeriodCharacter) -> NormalizedCharacter:
    """Rescale and re-basis a character to the standard model of its kind.

    Positive characters map to ``(1, i)``, negative to ``(1, -i)``,
    arithmetic to ``(1, 0)``, and non-arithmetic to ``(1, theta)`` with
    ``theta in (0, 1)`` irrational.  The recorded plane map has positive
    determinant and exact entries; composing it with the recorded basis
    change sends the original character to the normal form.
    """
    kind = classify(chi)
    F = chi.field
    if kind.is_positive or kind.is_negative:
        vol = chi.volume()
        # inverse of the matrix with columns g1, g2 (as vectors of the plane)
        r1, i1 = chi.g1.a, chi.g1.b
        r2, i2 = chi.g2.a, chi.g2.b
        det = vol  # r1*i2 - i1*r2
        inv = ((i2 / det, -r2 / det), (-i1 / det, r1 / det))
        if kind.is_negative:
            inv = (inv[0], (-inv[1][0], -inv[1][1]))
        Q = GroundField.rational()
        matrix = (
            (Q.element(inv[0][0]), Q.element(inv[0][1])),
            (Q.element(inv[1][0]), Q.element(inv[1][1])),
        )
        target_g2 = (0, 1) if kind.is_positive else (0, -1)
        norm_chi = PeriodCharacter.gaussian((1, 0), target_g2)
        return NormalizedCharacter(kind, norm_chi, matrix, ((1, 0), (0, 1)), chi)
    if kind.is_arithmetic:
        a = kind.generator
        scale = a.inverse()
        # after rescaling the periods are coprime integers (p, q)
        p_el = chi.g1 * scale
        q_el = chi.g2 * scale
        p, q = int(p_el.a), int(q_el.a)
        A = _basis_change_to_one_zero(p, q)
        if F.tag == "gaussian":
            matrix = _complex_mult_matrix(scale)
        else:
            matrix = _real_scale_matrix(scale)
        norm_chi = PeriodCharacter.rational(1, 0)
        return NormalizedCharacter(kind, norm_chi, matrix, A, chi)
    # non-arithmetic
    g1, g2 = chi.g1, chi.g2
    swap = ((0, -1), (1, 0))
    basis = ((1, 0), (0, 1))
    if g1.is_zero():
        g1, g2 = g2, -g1
        basis = swap
    scale = g1.inverse()
    if (g1 * scale).sign() < 0:  # keep the plane map orientation explicit
        scale = -scale
    theta0 = g2 * scale
    f = theta0.floor()
    shear = ((1, -f), (0, 1))
    basis = mat2_mul(basis, shear)
    theta = theta0 - f
    matrix = _real_scale_matrix(scale)
    norm_chi = PeriodCharacter(F, F.one(), theta)
    return NormalizedCharacter(kind, norm_chi, matrix, basis, chi)


def _basis_change_to_one_zero(p: int, q: int) -> Mat2:
    """A determinant-one matrix A with ``(p, q) A = (1, 0)``."""
    if gcd(p, q) != 1:
        raise ValueError("expected coprime integer periods")
    # x p + y q = 1
    x0, y0, x1, y1 = 1, 0, 0, 1
    a, b = p, q
    while b:
        k = a // b
        a, b = b, a - k * b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    if a == -1:
        x0, y0 = -x0, -y0
    # first column (x0, y0): (p, q) . (x0, y0) = 1; complete to det 1
    A = ((x0, -q), (y0, p))
    assert mat2_det(A) == 1
    # shear away the second entry: (p, q) A = (1, n) -> subtract n * first col
    n = p * A[0][1] + q * A[1][1]
    shear = ((1, -n), (0, 1))
    return mat2_mul(A, shear)


# ---------------------------------------------------------------------------
# characteristic triples


@dataclass(frozen=True)
class CharacteristicTriple:
    """A cyclically ordered triple of periods summing to zero.

    Consecutive pairs form oriented lattice bases: with the coordinate
    convention here, ``det(u_i, u_{i+1}) = 1`` for all three cyclic pairs,
    which is equivalent to ``Im(conj(value(u_i)) value(u_{i+1})) = Vol``.
    Stored in the canonical rotation (lexicographically least).
    """

    u1: LatticeElement
    u2: LatticeElement
    u3: LatticeElement

    @staticmethod
    def make(a: LatticeElement, b: LatticeElement, c: LatticeElement) -> "CharacteristicTriple":
        """Canonicalize a triple by cyclic rotation; validates the laws."""
        if (a + b + c).is_zero() is False:
            raise ValueError("triple coordinates must sum to zero")
        if not (a.det(b) == 1 and b.det(c) == 1 and c.det(a) == 1):
            raise ValueError("consecutive pairs must be oriented bases")
        rots = [(a, b, c), (b, c, a), (c, a, b)]
        key = lambda t: ((t[0].m, t[0].n), (t[1].m, t[1].n), (t[2].m, t[2].n))
        best = min(rots, key=key)
        return CharacteristicTriple(*best)

    def elements(self) -> tuple[LatticeElement, LatticeElement, LatticeElement]:
        return (self.u1, self.u2, self.u3)

    def rotated(self, j: int) -> tuple[LatticeElement, LatticeElement, LatticeElement]:
        """The rotation starting at slot ``j`` (0-based)."""
        e = self.elements()
        return (e[j % 3], e[(j + 1) % 3], e[(j + 2) % 3])

    def __neg__(self) -> "CharacteristicTriple":
        return CharacteristicTriple.make(-self.u1, -self.u2, -self.u3)

    def max_norm(self) -> int:
        return max(e.max_norm() for e in self.elements())

    def sort_key(self):
        return (
            (self.u1.m, self.u1.n),
            (self.u2.m, self.u2.n),
            (self.u3.m, self.u3.n),
        )


def enumerate_triples(chi: PeriodCharacter, bound: int) -> list[CharacteristicTriple]:
    """All characteristic triples with coordinates of max-norm ``<= bound``.

    Only defined on negative characters (where the triples index the
    degenerate-surface chambers of the leaf).

    Raises
    ------
    WrongLeafKind
        If the character is not negative.
    """
    if not classify(chi).is_negative:
        raise WrongLeafKind("characteristic triples require a negative character")
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
