"""Shared fixtures and helpers for the test suite."""

from fractions import Fraction

import pytest

from isoleaf.period_algebra import (
    GroundField,
    LatticeElement,
    PeriodCharacter,
)


@pytest.fixture
def chi_positive():
    """The normalized positive character (1, i)."""
    return PeriodCharacter.gaussian((1, 0), (0, 1))


@pytest.fixture
def chi_negative():
    """The normalized negative character (1, -i)."""
    return PeriodCharacter.gaussian((1, 0), (0, -1))


@pytest.fixture
def chi_arithmetic():
    """The normalized arithmetic character (1, 0)."""
    return PeriodCharacter.rational(1, 0)


@pytest.fixture
def chi_nonarith():
    """The normalized non-arithmetic character (1, sqrt(2))."""
    return PeriodCharacter.quadratic(2, (1, 0), (0, 1))


def lat(m, n):
    return LatticeElement(m, n)


def frac(num, den=1):
    return Fraction(num, den)


def gaussian_field():
    return GroundField.gaussian()
