"""Numeric realization of the leaf <-> Teichmueller correspondence.

Every point of an isoperiodic leaf with periods ``(p1, p2)`` is an elliptic
differential ``(a + b wp) dz`` on ``C/(Z + Z tau)``; the leaf coordinate is
the relative period between the two zeros of the differential.  This module
computes that correspondence numerically:

* :class:`WeierstrassData` evaluates ``wp``, ``wp'`` and ``zeta`` by
  q-series after reducing ``tau`` to the standard fundamental domain, with
  the quasi-periods mapped back through the modular transformation;
* :func:`solve_form` recovers ``(a, b)`` from the two target periods;
* :func:`relative_period` locates a zero of ``a + b wp`` and integrates the
  differential between the two zeros;
* :func:`leaf_to_teich` inverts the correspondence by damped Newton
  iteration with path continuation;
* :func:`chamber_trace` follows a cylinder-chamber wall inside the leaf and
  reports the normalized Teichmueller trace ``sigma(t)``, which stays within
  bounded hyperbolic distance of the model curve ``t + i log t``;
* :func:`boundary_limit` extrapolates the un-normalized trace to the real
  boundary and snaps to the predicted rational cusp.

Conventions fixed here (self-checked at construction time):

* quasi-periods ``eta_j = 2 zeta(omega_j / 2)`` for ``omega_1 = 1`` and
  ``omega_2 = tau`` satisfy ``eta1 * tau - eta2 = 2 pi i``;
* the nome is ``q2 = exp(2 pi i tau)`` (series are in integer powers of
  ``q2``), applied only after reduction to ``|Re tau| <= 1/2, |tau| >= 1``;
* the chamber normalization is the exact integral change of marking to the
  basis ``(u, v)``: it sends the chamber's limit point to ``infinity`` and
  the leaf center to ``i`` up to ``O(epsilon^2)`` (exactly ``i`` in the
  limit of vanishing wall offset for max-norm-1 chambers).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, pi
from typing import Callable, Iterable, Sequence

import numpy as np

from isoleaf.leaf_atlas import _pool_map
from isoleaf.period_algebra import (
    IsoleafError,
    PeriodCharacter,
    WrongLeafKind,
    classify,
)

__all__ = [
    "BoundaryLimit",
    "ChamberTrace",
    "DegenerateSystem",
    "NoConvergence",
    "NoDoubleZeroSplit",
    "PoleAt",
    "TeichPoint",
    "WeierstrassData",
    "boundary_limit",
    "chamber_trace",
    "complex_periods",
    "form_zero",
    "hyperbolic_distance",
    "leaf_coordinate",
    "leaf_to_teich",
    "model_point",
    "reduce_tau",
    "relative_period",
    "solve_form",
    "trace_many",
    "wp",
    "wzeta",
]

TWO_PI_I = 2j * pi


class PoleAt(IsoleafError):
    """Evaluation was requested at (numerically) a lattice point."""


class DegenerateSystem(IsoleafError):
    """The period system is singular or the target periods are zero."""


class NoDoubleZeroSplit(IsoleafError):
    """The differential does not have two distinct simple zeros.

    Raised when ``a + b wp`` has a double zero (the zero sits at a
    2-torsion point) or no zero at all (``b = 0``); these are exactly the
    completion points of the leaf, reported rather than solved.
    """


class NoConvergence(IsoleafError):
    """Newton iteration failed; ``trace`` holds (tau, residual) pairs."""

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = list(trace or [])


@dataclass(frozen=True)
class TeichPoint:
    """A point ``tau`` of the upper half plane."""

    tau: complex

    def __post_init__(self) -> None:
        if not complex(self.tau).imag > 0:
            raise ValueError("TeichPoint requires Im tau > 0")


def reduce_tau(tau: complex) -> tuple[complex, tuple[int, int, int, int]]:
    """Reduce ``tau`` to the fundamental domain of ``SL(2, Z)``.

    Returns ``(tau_r, (a, b, c, d))`` with ``tau_r = (a tau + b)/(c tau + d)``,
    ``|Re tau_r| <= 1/2`` and ``|tau_r| >= 1 - 1e-12``.
    """
    t = complex(tau)
    if not t.imag > 0:
        raise ValueError("tau must lie in the upper half plane")
    a, b, c, d = 1, 0, 0, 1
    for _ in range(256):
        n = round(t.real)
        if n:
            t -= n
            a, b = a - n * c, b - n * d
        if abs(t) < 1 - 1e-12:
            t = -1 / t
            a, b, c, d = -c, -d, a, b
        else:
            break
    return t, (a, b, c, d)


class WeierstrassData:
    """q-series evaluator for ``wp``, ``wp'``, ``zeta`` on ``Z + Z tau``.

    The series run at the reduced modulus and are mapped back through the
    tracked modular transformation, so evaluation is uniformly accurate for
    any ``tau`` in the upper half plane.  The Legendre relation
    ``eta1 tau - eta2 = 2 pi i`` is recomputed from two independent series
    and verified at construction.
    """

    def __init__(self, tau: complex, precision: float = 1e-12):
        tau = complex(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half plane")
        self.tau = tau
        self.precision = float(precision)
        tau_r, mat = reduce_tau(tau)
        self._tau_r = tau_r
        self._mat = mat
        a, b, c, d = mat
        self._lam = c * tau + d

        q2 = cmath.exp(TWO_PI_I * tau_r)
        # worst-case per-term ratio: |q2|^k * e^{2 pi k |Im z0|} with
        # |Im z0| <= Im(tau_r)/2 after lattice reduction
        rho = math.exp(-pi * tau_r.imag)
        target = self.precision * 1e-3
        K = 8
        while K < 4000 and (K + 1) ** 2 * rho ** (K + 1) > target * (1 - rho):
            K += 4
        self._K = K
        Q = []
        qk = 1.0 + 0j
        for k in range(1, K + 1):
            qk *= q2
            Q.append(qk / (1 - qk))
        self._Q = Q

        e2_sum = sum((k + 1) * Q[k] for k in range(K))
        self._eta1_r = (pi * pi / 3) * (1 - 24 * e2_sum)
        self._eta2_r = 2 * self._zeta_reduced(tau_r / 2)
        legendre = self._eta1_r * tau_r - self._eta2_r
        if abs(legendre - TWO_PI_I) > max(1e-9, 1e4 * self.precision):
            raise IsoleafError(
                f"Legendre self-check failed at tau={tau!r}: {legendre!r}"
            )
        self.eta1 = (a * self._eta1_r - c * self._eta2_r) / self._lam
        self.eta2 = (-b * self._eta1_r + d * self._eta2_r) / self._lam

    # -- reduced-lattice series -------------------------------------------

    def _reduce_z(self, z: complex) -> tuple[complex, int, int]:
        """Write ``z/lam = z0 + m + n tau_r`` with ``z0`` centered."""
        w = complex(z) / self._lam
        tr = self._tau_r
        n = round(w.imag / tr.imag)
        m = round((w - n * tr).real)
        return w - m - n * tr, m, n

    def _pole_check(self, z0: complex) -> None:
        if abs(z0) < 1e-10:
            raise PoleAt(f"evaluation at lattice point (offset {abs(z0):.2e})")

    def _wp_reduced(self, z0: complex) -> complex:
        s = cmath.sin(pi * z0)
        total = (pi / s) ** 2 - pi * pi / 3
        e = cmath.exp(2j * pi * z0)
        einv = 1 / e
        ek, emk = 1.0 + 0j, 1.0 + 0j
        acc = 0.0 + 0j
        for k, Qk in enumerate(self._Q, start=1):
            ek *= e
            emk *= einv
            acc += k * Qk * (2 - ek - emk)  # 2 - 2 cos(2 pi k z0)
        return total + 4 * pi * pi * acc

    def _wp_prime_reduced(self, z0: complex) -> complex:
        s = cmath.sin(pi * z0)
        total = -2 * pi**3 * cmath.cos(pi * z0) / s**3
        e = cmath.exp(2j * pi * z0)
        einv = 1 / e
        ek, emk = 1.0 + 0j, 1.0 + 0j
        acc = 0.0 + 0j
        for k, Qk in enumerate(self._Q, start=1):
            ek *= e
            emk *= einv
            acc += k * k * Qk * (ek - emk) / 2j  # k^2 Q_k sin(2 pi k z0)
        return total + 16 * pi**3 * acc

    def _zeta_reduced(self, z0: complex) -> complex:
        s = cmath.sin(pi * z0)
        total = self._eta1_r * z0 + pi * cmath.cos(pi * z0) / s
        e = cmath.exp(2j * pi * z0)
        einv = 1 / e
        ek, emk = 1.0 + 0j, 1.0 + 0j
        acc = 0.0 + 0j
        for Qk in self._Q:
            ek *= e
            emk *= einv
            acc += Qk * (ek - emk) / 2j  # Q_k sin(2 pi k z0)
        return total + 4 * pi * acc

    # -- public evaluators (original lattice) -----------------------------

    def wp(self, z: complex) -> complex:
        z0, _, _ = self._reduce_z(z)
        self._pole_check(z0)
        return self._wp_reduced(z0) / self._lam**2

    def wp_prime(self, z: complex) -> complex:
        z0, _, _ = self._reduce_z(z)
        self._pole_check(z0)
        return self._wp_prime_reduced(z0) / self._lam**3

    def wzeta(self, z: complex) -> complex:
        z0, m, n = self._reduce_z(z)
        self._pole_check(z0)
        val = self._zeta_reduced(z0) + m * self._eta1_r + n * self._eta2_r
        return val / self._lam

    def half_period_values(self) -> tuple[complex, complex, complex]:
        """``wp`` at the three 2-torsion points of ``Z + Z tau``."""
        t = self.tau
        return (self.wp(0.5), self.wp(t / 2), self.wp((1 + t) / 2))


_DATA_CACHE: dict[tuple[complex, float], WeierstrassData] = {}


def _data(tau: complex, precision: float = 1e-12) -> WeierstrassData:
    key = (complex(tau), float(precision))
    data = _DATA_CACHE.get(key)
    if data is None:
        if len(_DATA_CACHE) > 256:
            _DATA_CACHE.clear()
        data = WeierstrassData(tau, precision)
        _DATA_CACHE[key] = data
    return data


def wp(z: complex, tau: complex) -> complex:
    """The Weierstrass ``wp`` function of the lattice ``Z + Z tau``."""
    return _data(tau).wp(z)


def wzeta(z: complex, tau: complex) -> complex:
    """The Weierstrass ``zeta`` function of the lattice ``Z + Z tau``."""
    return _data(tau).wzeta(z)


# -- the differential with prescribed periods ------------------------------


def solve_form(
    tau: complex, p1: complex, p2: complex, precision: float = 1e-12
) -> tuple[complex, complex]:
    """Coefficients ``(a, b)`` of the differential ``(a + b wp) dz``.

    Solves ``p1 = a - b eta1`` and ``p2 = a tau - b eta2``; the system
    determinant is ``2 pi i`` by the Legendre relation, so it is never
    degenerate for ``tau`` in the upper half plane.
    """
    if p1 == 0 and p2 == 0:
        raise DegenerateSystem("target periods must not both vanish")
    data = _data(tau, precision)
    det = tau * data.eta1 - data.eta2
    if abs(det) < 1e-6:
        raise DegenerateSystem("period system is numerically singular")
    a = (data.eta1 * p2 - data.eta2 * p1) / det
    b = (p2 - tau * p1) / det
    return a, b


def form_zero(
    tau: complex,
    a: complex,
    b: complex,
    precision: float = 1e-12,
    seed: complex | None = None,
) -> complex:
    """One zero ``z0`` of ``a + b wp`` (the other is ``-z0`` mod lattice).

    Raises :class:`NoDoubleZeroSplit` when the zero is double (2-torsion
    target value) or when ``b = 0`` (no zeros at all).
    """
    data = _data(tau, precision)
    scale = max(1.0, abs(a))
    if abs(b) < 1e-12 * scale:
        raise NoDoubleZeroSplit("b = 0: the differential has no zeros")
    target = -a / b
    halves = data.half_period_values()
    escale = max(1.0, *(abs(e) for e in halves))
    hscale = max(escale, abs(target))
    if min(abs(target - e) for e in halves) < max(1e-7, 1e3 * precision) * hscale:
        raise NoDoubleZeroSplit(
            "wp target value is a 2-torsion value: double zero"
        )

    def newton(z: complex) -> complex | None:
        for _ in range(60):
            try:
                f = data.wp(z) - target
            except PoleAt:
                return None
            if abs(f) < precision * max(1.0, abs(target)):
                return z
            df = data.wp_prime(z)
            if abs(df) < 1e-14:
                return None
            step = -f / df
            cap = 0.45 * min(1.0, abs(data.tau))
            if abs(step) > cap:
                step *= cap / abs(step)
            z = z + step
        return None

    seeds: list[complex] = []
    if seed is not None:
        seeds.append(complex(seed))
    else:
        if abs(target) > 4 * escale:
            # zero close to the pole: wp(z) ~ 1/z^2
            root = 1 / cmath.sqrt(target)
            seeds.extend((root, -root))
        grid = []
        G = 14
        for i in range(G):
            for j in range(G):
                z = (i + 0.5) / G + (j + 0.5) / G * data.tau
                try:
                    val = data.wp(z)
                except PoleAt:
                    continue
                grid.append((abs(val - target), z))
        grid.sort(key=lambda item: item[0])
        seeds.extend(z for _, z in grid[:6])
    for z in seeds:
        root = newton(z)
        if root is not None:
            return root
    raise NoConvergence("zero search for a + b wp failed")


def relative_period(
    tau: complex,
    a: complex,
    b: complex,
    precision: float = 1e-12,
    seed: complex | None = None,
) -> complex:
    """Relative period ``2 a z0 - 2 b zeta(z0)`` between the two zeros.

    Defined up to sign (choice of zero ordering) and up to the absolute
    period lattice (choice of integration path).
    """
    data = _data(tau, precision)
    z0 = form_zero(tau, a, b, precision, seed=seed)
    return 2 * a * z0 - 2 * b * data.wzeta(z0)


def complex_periods(chi: PeriodCharacter) -> tuple[complex, complex]:
    """The complex embedding of the two periods of ``chi``."""
    return complex(chi.g1), complex(chi.g2)


# -- leaf <-> Teichmueller inversion ---------------------------------------


def _lattice_reduce(z: complex, p1: complex, p2: complex) -> tuple[complex, int, int]:
    """Closest representative of ``z`` modulo ``Z p1 + Z p2`` (if a lattice)."""
    det = p1.real * p2.imag - p2.real * p1.imag
    if abs(det) < 1e-12:
        return z, 0, 0
    m = (z.real * p2.imag - p2.real * z.imag) / det
    n = (p1.real * z.imag - z.real * p1.imag) / det
    mi, ni = round(m), round(n)
    return z - mi * p1 - ni * p2, mi, ni


class _FormState:
    """Continuation state for Newton tracking: current tau and zero branch."""

    def __init__(self, p1: complex, p2: complex, precision: float):
        self.p1 = p1
        self.p2 = p2
        self.precision = precision
        self.tau: complex | None = None
        self.z0: complex | None = None

    def w(self, tau: complex, update: bool = False) -> complex:
        """Relative period at ``tau`` following the current zero branch."""
        a, b = solve_form(tau, self.p1, self.p2, self.precision)
        seed = self.z0
        z0 = form_zero(tau, a, b, self.precision, seed=seed)
        if seed is not None:
            z0 = _align_zero(z0, seed, tau)
        w = 2 * a * z0 - 2 * b * _data(tau, self.precision).wzeta(z0)
        if update:
            self.tau = tau
            self.z0 = z0
        return w


def _align_zero(z0: complex, seed: complex, tau: complex) -> complex:
    """Representative of ``{+-z0 mod Z + Z tau}`` closest to ``seed``.

    The two zeros of ``a + b wp`` are ``+-z0`` modulo the curve lattice;
    picking the representative nearest the previous zero keeps the
    continuation on one branch, so the tracked relative period stays
    continuous (a sign or lattice jump would silently switch sheets).
    """
    best = z0
    for s in (1, -1):
        base = s * z0
        d = base - seed
        n = round(d.imag / tau.imag)
        m = round((d - n * tau).real)
        cand = base - m - n * tau
        if abs(cand - seed) < abs(best - seed):
            best = cand
    return best


def _newton_track(
    state: _FormState,
    tau: complex,
    target: complex,
    precision: float,
    scale: float,
    max_iter: int = 80,
    trace: list | None = None,
) -> complex:
    """Damped Newton on ``tau`` for ``w(tau) = target``; returns ``tau``."""
    w = state.w(tau, update=True)
    res = w - target
    tol = precision * max(scale, abs(target))
    for _ in range(max_iter):
        if abs(res) < tol:
            return tau
        if trace is not None:
            trace.append((tau, abs(res)))
        h = 1e-6 * max(1.0, abs(tau))
        try:
            wp_ = state.w(tau + h)
            wm_ = state.w(tau - h)
        except (NoDoubleZeroSplit, NoConvergence) as exc:
            raise NoConvergence(f"derivative evaluation failed: {exc}", trace)
        dw = (wp_ - wm_) / (2 * h)
        if abs(dw) < 1e-14:
            raise NoConvergence("vanishing derivative in Newton step", trace)
        step = -res / dw
        accepted = False
        for _half in range(18):
            tau_try = tau + step
            if tau_try.imag < 1e-7:
                step /= 2
                continue
            try:
                w_try = state.w(tau_try)
            except (NoDoubleZeroSplit, NoConvergence):
                step /= 2
                continue
            if abs(w_try - target) < abs(res):
                tau = tau_try
                w = state.w(tau, update=True)
                res = w - target
                accepted = True
                break
            step /= 2
        if not accepted:
            raise NoConvergence("Newton damping exhausted", trace)
    raise NoConvergence("Newton iteration limit reached", trace)


def _match_target(
    w0: complex,
    z_rel: complex,
    p1: complex,
    p2: complex,
    signs: tuple[int, ...] = (1, -1),
) -> complex:
    """Lift ``z_rel`` (mod sign and periods) to the branch nearest ``w0``.

    When the periods span a rank-2 lattice the closest translate comes from
    exact lattice reduction.  Degenerate spans (one period zero, or both
    real) still carry the translation ambiguity, so small integer offsets
    are enumerated directly; their nonzero combinations stay well above
    any sensible guess error, so the match cannot slip to a wrong sheet.
    """
    det = p1.real * p2.imag - p2.real * p1.imag
    best = None
    for s in signs:
        base = s * z_rel
        if abs(det) > 1e-12:
            _, mi, ni = _lattice_reduce(base - w0, p1, p2)
            cands = [base - mi * p1 - ni * p2]
        else:
            cands = [
                base - m * p1 - n * p2
                for m in range(-4, 5)
                for n in range(-4, 5)
            ]
        for cand in cands:
            if best is None or abs(cand - w0) < abs(best - w0):
                best = cand
    return best


def _center_tau(p1: complex, p2: complex) -> complex | None:
    """Modulus of the zero-free (flat) point of the leaf, if it exists."""
    if p1 == 0:
        return None
    tau0 = p2 / p1
    return tau0 if tau0.imag > 0 else None


def _center_seed(p1: complex, p2: complex, z: complex) -> complex | None:
    """Quadratic model of tau near the flat center: tau0 + 2 pi i z^2/(16 p1^2)."""
    tau0 = _center_tau(p1, p2)
    if tau0 is None:
        return None
    tau = tau0 + TWO_PI_I * z * z / (16 * p1 * p1)
    if tau.imag <= 0:
        tau = tau0 + 1j * max(1e-6, abs(z) ** 2)
    return tau


def leaf_to_teich(
    chi: PeriodCharacter,
    z_rel: complex,
    tau_guess: complex,
    precision: float = 1e-9,
    max_iter: int = 80,
) -> TeichPoint:
    """Invert the leaf coordinate: the ``tau`` whose differential with the
    periods of ``chi`` has relative period ``z_rel`` (mod sign and periods).

    Raises :class:`NoDoubleZeroSplit` at the completion points (``z_rel``
    in the period lattice: flat center or slit tips) and
    :class:`NoConvergence` with the Newton trace otherwise on failure.
    """
    p1, p2 = complex_periods(chi)
    z = complex(z_rel)
    scale = max(1.0, abs(p1), abs(p2))
    det = p1.real * p2.imag - p2.real * p1.imag
    if abs(det) > 1e-12:
        reduced, _, _ = _lattice_reduce(z, p1, p2)
        near_lattice = abs(reduced) < 1e-10 * scale
    else:
        near_lattice = any(
            abs(z - m * p1 - n * p2) < 1e-10 * scale
            for m in range(-4, 5)
            for n in range(-4, 5)
        )
    if near_lattice:
        raise NoDoubleZeroSplit(
            "z_rel lies in the period lattice: leaf completion point"
        )
    tau = complex(tau_guess)
    if not tau.imag > 0:
        raise ValueError("tau_guess must lie in the upper half plane")

    a, b = solve_form(tau, p1, p2, min(precision, 1e-12))
    if abs(b) < 1e-8 * max(1.0, abs(a)):
        seed = _center_seed(p1, p2, z)
        if seed is not None:
            tau = seed

    state = _FormState(p1, p2, min(precision, 1e-12))
    trace: list = []
    try:
        w0 = state.w(tau, update=True)
        target = _match_target(w0, z, p1, p2)
        tau_out = _newton_track(
            state, tau, target, precision, scale, max_iter, trace
        )
        if _inversion_verified(p1, p2, z, tau_out, precision):
            return TeichPoint(tau_out)
    except (NoConvergence, NoDoubleZeroSplit):
        pass

    # homotopy fallback: slide the target from the guess coordinate to z
    # along a straight segment, staying on the tracked zero branch
    try:
        state = _FormState(p1, p2, min(precision, 1e-12))
        tau_h = tau
        w0 = state.w(tau_h, update=True)
        target = _match_target(w0, z, p1, p2)
        for s in np.linspace(0.0, 1.0, 17)[1:]:
            tau_h = _newton_track(
                state, tau_h, w0 + s * (target - w0), precision, scale,
                max_iter, trace,
            )
        if _inversion_verified(p1, p2, z, tau_h, precision):
            return TeichPoint(tau_h)
    except (NoConvergence, NoDoubleZeroSplit):
        pass

    # continuation fallback: walk from a small multiple of z_rel outwards
    seed = _center_seed(p1, p2, 0.2 * z)
    if seed is None:
        raise NoConvergence("Newton failed and no center continuation", trace)
    state = _FormState(p1, p2, min(precision, 1e-12))
    tau = seed
    w0 = state.w(tau, update=True)
    target0 = _match_target(w0, 0.2 * z, p1, p2)
    shift = target0 - 0.2 * z
    for s in np.linspace(0.2, 1.0, 17):
        target = s * z + shift
        tau = _newton_track(state, tau, target, precision, scale, max_iter, trace)
    if not _inversion_verified(p1, p2, z, tau, precision):
        raise NoConvergence(
            "inversion landed on a distant translate of the coordinate", trace
        )
    return TeichPoint(tau)


def _inversion_verified(
    p1: complex, p2: complex, z: complex, tau_out: complex, precision: float
) -> bool:
    """Check that ``tau_out`` reproduces ``z`` up to sign and a short
    period translation.

    A freshly evaluated coordinate may differ from the requested one by
    the orientation of the zero pair or by a small number of periods
    (different integration path); anything farther means the solver
    wandered to another sheet and the result should not be accepted.
    """
    try:
        a, b = solve_form(tau_out, p1, p2, min(precision, 1e-12))
        zb = relative_period(tau_out, a, b, min(precision, 1e-12))
    except IsoleafError:
        return False
    tol = max(1e-6, 1e3 * precision) * max(1.0, abs(z))
    best = min(
        abs(zb - s * z - m * p1 - n * p2)
        for s in (1, -1)
        for m in range(-2, 3)
        for n in range(-2, 3)
    )
    return best < tol


def leaf_coordinate(
    chi: PeriodCharacter, tau: complex, precision: float = 1e-12
) -> complex:
    """Forward map: the relative-period coordinate of ``tau`` on the leaf."""
    p1, p2 = complex_periods(chi)
    a, b = solve_form(tau, p1, p2, precision)
    return relative_period(tau, a, b, precision)


# -- chamber traces and boundary limits ------------------------------------


def hyperbolic_distance(z: complex, w: complex) -> float:
    """Distance in the hyperbolic metric of the upper half plane."""
    z, w = complex(z), complex(w)
    if z.imag <= 0 or w.imag <= 0:
        raise ValueError("hyperbolic distance needs upper-half-plane points")
    arg = 1 + abs(z - w) ** 2 / (2 * z.imag * w.imag)
    return math.acosh(max(1.0, arg))


def model_point(t: float) -> complex:
    """The comparison curve ``t + i log t`` (t > 0)."""
    if t <= 0:
        raise ValueError("model curve is defined for t > 0")
    return complex(t, math.log(t))


def _companion(p: int, q: int) -> tuple[int, int]:
    """Complete primitive ``(p, q)`` to a positive basis with short projection.

    Returns ``(r, s)`` with ``p s - q r = 1`` minimizing the projection of
    ``r + s i`` onto ``p + q i``.
    """
    g, x, y = _ext_gcd(p, q)
    # p*x + q*y = 1 -> choose r = -y, s = x so that p*s - q*r = 1
    r, s = -y, x
    norm2 = p * p + q * q
    proj = p * r + q * s  # Re(v * conj(u)) in the square-lattice embedding
    k = round(proj / norm2)
    return r - k * p, s - k * q


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _wall_crossings(
    path: Sequence[complex], p1: complex, p2: complex
) -> bool:
    """Whether a path segment crosses a slit ray ``{s*gamma : s >= 1}``.

    A slit with endpoint ``gamma`` crosses segment ``[za, zb]`` exactly when
    the lattice point ``gamma`` lies in the closed triangle ``(0, za, zb)``;
    the origin itself is excluded.
    """
    det = p1.real * p2.imag - p2.real * p1.imag
    if abs(det) < 1e-12:
        return False

    def coords(z: complex) -> tuple[float, float]:
        m = (z.real * p2.imag - p2.real * z.imag) / det
        n = (p1.real * z.imag - z.real * p1.imag) / det
        return m, n

    for za, zb in zip(path, path[1:]):
        ax, ay = coords(za)
        bx, by = coords(zb)
        cross_ab = ax * by - bx * ay
        if abs(cross_ab) < 1e-15:
            continue
        lo_n = math.floor(min(0.0, ay, by)) - 1
        hi_n = math.ceil(max(0.0, ay, by)) + 1
        # P=(m,n) is in triangle(0,A,B) iff the barycentric coordinates
        # alpha = cross(P,B)/cross(A,B), beta = cross(A,P)/cross(A,B)
        # satisfy alpha >= 0, beta >= 0, alpha + beta <= 1
        tol = 1e-9
        for n in range(lo_n, hi_n + 1):
            # alpha = (m*by - bx*n)/cross_ab >= -tol etc.: linear in m
            lo_m, hi_m = -math.inf, math.inf
            for coeff, const in (
                (by / cross_ab, -bx * n / cross_ab),  # alpha
                (-ay / cross_ab, ax * n / cross_ab),  # beta
            ):
                if abs(coeff) < 1e-15:
                    if const < -tol:
                        lo_m, hi_m = 1.0, 0.0
                        break
                    continue
                bound = (-tol - const) / coeff
                if coeff > 0:
                    lo_m = max(lo_m, bound)
                else:
                    hi_m = min(hi_m, bound)
            if lo_m > hi_m:
                continue
            # alpha + beta <= 1 + tol
            coeff = (by - ay) / cross_ab
            const = (ax - bx) * n / cross_ab
            if abs(coeff) < 1e-15:
                if const > 1 + tol:
                    continue
            else:
                bound = (1 + tol - const) / coeff
                if coeff > 0:
                    hi_m = min(hi_m, bound)
                else:
                    lo_m = max(lo_m, bound)
            m_first = math.ceil(lo_m - 1e-12)
            m_last = math.floor(hi_m + 1e-12)
            for m in range(m_first, m_last + 1):
                if m == 0 and n == 0:
                    continue
                return True
    return False


def _trace_grid(samples: Sequence[float], horizon: float) -> list[float]:
    """Monotone grid through 0 and every sample, refined near the center."""
    pts = {0.0}
    pts.update(float(t) for t in samples)
    tmax = max(horizon, max(pts))
    t = 0.0
    while t < 1.0:
        t += 1 / 8
        pts.add(min(t, tmax))
    while t < tmax:
        t = min(t * 1.06 + 1 / 16, tmax)
        pts.add(t)
    return sorted(pts)


@dataclass
class ChamberTrace:
    """A normalized Teichmueller trace along one cylinder-chamber wall."""

    u: tuple[int, int]
    v: tuple[int, int]
    epsilon: float
    cusp: Fraction | None  # raw-boundary limit -p/q; None means infinity
    points: list[tuple[float, complex]]  # requested (t, sigma(t))
    raw: list[tuple[float, complex]]  # full internal grid (t, tau(t))

    def sigma(self, tau: complex) -> complex:
        """The chamber normalization: exact change of marking to (u, v)."""
        p, q = self.u
        r, s = self.v
        return (s * tau + r) / (q * tau + p)

    def distances(
        self, model: Callable[[float], complex] = model_point
    ) -> list[tuple[float, float]]:
        """Hyperbolic distances from the trace to the model curve.

        Parameters where the model leaves the upper half plane (for the
        default curve ``t + i log t`` this is ``t <= 1``) are skipped.
        """
        out = []
        for t, sig in self.points:
            if t <= 0:
                continue
            m = model(t)
            if m.imag <= 0 or sig.imag <= 0:
                continue
            out.append((t, hyperbolic_distance(sig, m)))
        return out


def _raw_wall_trace(
    chi: PeriodCharacter,
    u: tuple[int, int],
    grid: Sequence[float],
    precision: float,
    epsilon: float | None,
) -> tuple[float, list[tuple[float, complex]]]:
    """Continuation of tau along ``z = t*u - i*eps*u/|u|``; returns raw taus."""
    p1, p2 = complex_periods(chi)
    p, q = u
    u_c = p * p1 + q * p2
    eps = epsilon if epsilon is not None else abs(u_c) / 64
    unit = u_c / abs(u_c)

    for _ in range(40):
        path = [t * u_c - 1j * eps * unit for t in grid]
        if not _wall_crossings(path, p1, p2):
            break
        eps /= 2
    else:
        raise NoConvergence("wall offset halving failed to clear slits")

    state = _FormState(p1, p2, min(precision, 1e-12))
    z_start = path[0]
    tau = _center_seed(p1, p2, z_start)
    if tau is None:
        raise WrongLeafKind("trace requires a leaf with a flat center point")
    scale = max(1.0, abs(p1), abs(p2))
    w0 = state.w(tau, update=True)
    # the fresh zero search may compute the coordinate with either global
    # sign; tracking -z visits the same moduli but mirrors the slit side,
    # so fold the sign into the requested path instead of the lift
    sign = 1 if abs(w0 - z_start) <= abs(w0 + z_start) else -1
    target0 = _match_target(w0, sign * z_start, p1, p2, signs=(1,))
    shift = target0 - sign * z_start

    raw: list[tuple[float, complex]] = []
    for t, z in zip(grid, path):
        target = sign * z + shift
        tau = _newton_track(state, tau, target, precision, scale)
        raw.append((float(t), tau))
    return eps, raw


def chamber_trace(
    chi: PeriodCharacter,
    u: Sequence[int],
    t_samples: Sequence[float],
    precision: float = 1e-9,
    epsilon: float | None = None,
    horizon: float | None = None,
) -> ChamberTrace:
    """Trace the wall of the cylinder chamber with core ``u`` into ``H^2``.

    Follows the leaf points ``z = t u - i eps u/|u|`` just inside the
    adjacent torus chamber, maps them through :func:`leaf_to_teich`
    continuation, and applies the exact integral chamber normalization: the
    change of marking to the basis ``(u, v)``, which sends the chamber's
    boundary limit to ``infinity``.
    """
    kind = classify(chi)
    if kind.kind != "positive":
        raise WrongLeafKind("chamber traces are implemented for positive leaves")
    p, q = (int(u[0]), int(u[1]))
    if gcd(p, q) != 1:
        raise ValueError("u must be a primitive lattice element")
    samples = sorted(float(t) for t in t_samples)
    if samples and samples[0] < 0:
        raise ValueError("trace parameters must be >= 0")
    tmax = samples[-1] if samples else 1.0
    grid = _trace_grid(samples, horizon if horizon is not None else tmax)
    eps, raw = _raw_wall_trace(chi, (p, q), grid, precision, epsilon)

    r, s = _companion(p, q)
    by_t = dict(raw)
    points = []
    for t in samples:
        tau = by_t[t]
        points.append((t, (s * tau + r) / (q * tau + p)))
    cusp = Fraction(-p, q) if q else None
    return ChamberTrace(
        u=(p, q), v=(r, s), epsilon=eps, cusp=cusp, points=points, raw=raw
    )


def trace_many(
    chi: PeriodCharacter,
    us: Iterable[Sequence[int]],
    t_samples: Sequence[float],
    precision: float = 1e-9,
) -> dict[tuple[int, int], ChamberTrace]:
    """Concurrent chamber traces (sequential continuation within each)."""
    us = [tuple(int(c) for c in u) for u in us]
    results = _pool_map(
        lambda u: chamber_trace(chi, u, t_samples, precision), us
    )
    return dict(zip(us, results))


@dataclass
class BoundaryLimit:
    """Extrapolated raw boundary point of a cylinder-chamber wall."""

    u: tuple[int, int]
    estimate: float  # math.inf when the trace escapes to i*infinity
    rational: Fraction | None  # nearest p'/q' with q' <= |q|; None = infinity
    samples: list[tuple[float, complex]] = field(repr=False, default_factory=list)


def boundary_limit(
    chi: PeriodCharacter,
    u: Sequence[int],
    tmax: float = 192.0,
    precision: float = 1e-9,
) -> BoundaryLimit:
    """Extrapolate the un-normalized trace of chamber ``u`` to its cusp.

    Fits ``Re tau(t)`` against ``[1, 1/t, log t/t^2, 1/t^2]`` on the tail of
    the trace and returns the constant term together with the nearest
    rational of denominator at most ``|q|`` (``None`` when the trace
    diverges to ``i*infinity``, the cusp of the chambers with ``q = 0``).
    """
    kind = classify(chi)
    if kind.kind != "positive":
        raise WrongLeafKind("boundary limits are implemented for positive leaves")
    p, q = (int(u[0]), int(u[1]))
    if gcd(p, q) != 1:
        raise ValueError("u must be a primitive lattice element")
    grid = _trace_grid([tmax], tmax)
    _, raw = _raw_wall_trace(chi, (p, q), grid, precision, None)
    tail = [(t, tau) for t, tau in raw if t >= max(8.0, tmax / 8)]

    ts = np.array([t for t, _ in tail])
    res = np.array([tau.real for _, tau in tail])
    drift = np.polyfit(ts, res, 1)[0]
    if abs(drift) > 0.05:
        # Re tau grows linearly: the wall escapes to the cusp at infinity
        return BoundaryLimit(u=(p, q), estimate=math.inf, rational=None, samples=tail)
    basis = np.column_stack(
        [np.ones_like(ts), 1 / ts, np.log(ts) / ts**2, 1 / ts**2]
    )
    coeffs, *_ = np.linalg.lstsq(basis, res, rcond=None)
    estimate = float(coeffs[0])

    best: Fraction | None = None
    for den in range(1, abs(q) + 1):
        cand = Fraction(round(estimate * den), den)
        if best is None or abs(estimate - cand) < abs(estimate - best):
            best = cand
    return BoundaryLimit(u=(p, q), estimate=estimate, rational=best, samples=tail)
