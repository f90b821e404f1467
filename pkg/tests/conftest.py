"""Shared fixtures: reference spaces, profiles, and charts."""

import math

import pytest

from bcvhelix import BcvSpace, BourSeed, SmoothFunction, build_chart

R3 = BcvSpace(0.0, 0.0)
NIL = BcvSpace(0.0, 0.5)
SPHERE = BcvSpace(1.0, 0.5)
S2XR = BcvSpace(1.5, 0.0)
H2XR = BcvSpace(-0.75, 0.0)
SU2_SPACE = BcvSpace(2.0, 0.5)
SL2R_SPACE = BcvSpace(-1.0, 0.35)

FIVE_SPACES = [R3, NIL, SPHERE, S2XR, SL2R_SPACE]


def catenoid_profile(d: float = 1.0) -> SmoothFunction:
    """U = sqrt(u^2 + d^2): the Euclidean catenoid / helicoid family profile."""
    return SmoothFunction(
        lambda u: math.sqrt(u * u + d * d),
        lambda u: u / math.sqrt(u * u + d * d),
        lambda u: d * d / (u * u + d * d) ** 1.5,
    )


def nil_catenoid_profile() -> SmoothFunction:
    """U = (u^2 + 2)/2: the helicoidal-catenoid family profile in Nil3."""
    return SmoothFunction(lambda u: 0.5 * (u * u + 2.0), lambda u: u, lambda u: 1.0)


@pytest.fixture(scope="session")
def nil_catenoid_chart():
    seed = BourSeed(nil_catenoid_profile(), 1.0, 0.5, (-3.3, 3.3))
    return build_chart(NIL, seed)


@pytest.fixture(scope="session")
def catenoid_chart():
    seed = BourSeed(catenoid_profile(), 1.0, 0.0, (-2.6, 2.6))
    return build_chart(R3, seed)


@pytest.fixture(scope="session")
def helicoid_chart():
    seed = BourSeed(catenoid_profile(), 1.0, 1.0, (-2.6, 2.6))
    return build_chart(R3, seed)
