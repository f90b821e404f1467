"""Constant-mean-curvature condition and its closed-form solution families.

A Bour family member with metric profile U has constant mean curvature H iff

    H sqrt( 4 (m^2 U^2 - a^2) / ((1+sqrt(D))^2 - 4 tau^2 m^2 U^2)
            - m^4 B^2 U^2 U'^2 / D )  =  2 - B - m^2 B (U U'/sqrt(D))',

with D = (1 - 2 a tau)^2 + (m^2 U^2 - a^2)(4 tau^2 - kappa) and
B = 2 (1 - 2 a tau + sqrt(D)) / ((1+sqrt(D))^2 - 4 tau^2 m^2 U^2).

The solutions split into five cases by (kappa - 4 tau^2, H^2 + kappa); the
sqrt(D) of the non-space-form cases obeys

    (sqrt(D))' = sqrt( -(H^2+kappa) D + 2 b1 sqrt(D) + b ),

whose closed-form integrals give U^2 per case below.  Constants:

    b  = (1 - 2 a tau)(kappa (1 + 2 a tau) - 8 tau^2) - c^2
    b1 = 4 tau^2 - 2 a kappa tau - c H        b2 = -b / (2 b1)
    b3 = 4 a tau - a^2 kappa - 1
    c1 = 1 + (1 - 2 a tau)^2 - c H            c2 = -c^2 - 4 a^2 (1 - a tau)^2

Note the square in c2: expanding the space-form first integral
(2 x x')^2 = 4[(1-2 a tau) - tau^2 (x^2-a^2)](x^2-a^2) - (H x^2 + c)^2 in
z = x^2 yields the constant term -c^2 - 4 a^2 (1 - 2 a tau + a^2 tau^2);
the unsquared variant fails the CMC equation for a*tau != 0 (checked in
tests against an independent finite-difference evaluation).

The hyperbolic sinh sub-branch (b1^2 + b (H^2+kappa) < 0) is implemented for
completeness but is unreachable from real parameters: viewed as a quadratic
in c, b1^2 + b (H^2+kappa) has leading coefficient -kappa > 0 and
discriminant 4 (H^2+kappa)(4 tau^2 - kappa)^2 < 0, so its minimum
(H^2+kappa)(4 tau^2 - kappa)^2 / kappa is strictly positive whenever
H^2 + kappa < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .bour import BourSeed
from .errors import (
    DegenerateFamily,
    DomainError,
    NegativeDiscriminant,
    NegativeRadicand,
    NoRealFamily,
    ParameterOutOfRange,
)
from .numerics import DEFAULT_TOL, SmoothFunction, Tolerances
from .spaces import BcvSpace, SpaceClass, classify

__all__ = [
    "CmcConstants",
    "CmcCase",
    "cmc_constants",
    "select_case",
    "cmc_U",
    "minimal_U",
    "cmc_residual",
    "first_integral_check",
    "z_ode_residual",
    "sqrt_delta_ode_residual",
]


class CmcCase(Enum):
    EUCLIDEAN_MINIMAL = "EuclideanMinimal"
    SPACE_FORM_GENERIC = "SpaceFormGeneric"
    CRITICAL_KAPPA = "CriticalKappa"
    OSCILLATORY = "Oscillatory"
    HYPERBOLIC_SINH = "HyperbolicSinh"
    HYPERBOLIC_COSH = "HyperbolicCosh"


@dataclass(frozen=True)
class CmcConstants:
    b: float
    b1: float
    b2: Optional[float]  # absent (None) when b1 == 0
    b3: float
    c1: float
    c2: float
    c: float
    H: float


def cmc_constants(space: BcvSpace, a: float, H: float, c: float) -> CmcConstants:
    """The constant table of the solution families (b2 absent iff b1 = 0)."""
    kappa, tau = space.kappa, space.tau
    b = (1.0 - 2.0 * a * tau) * (kappa * (1.0 + 2.0 * a * tau) - 8.0 * tau * tau) - c * c
    b1 = 4.0 * tau * tau - 2.0 * a * kappa * tau - c * H
    b2 = -b / (2.0 * b1) if b1 != 0.0 else None
    b3 = 4.0 * a * tau - a * a * kappa - 1.0
    c1 = 1.0 + (1.0 - 2.0 * a * tau) ** 2 - c * H
    c2 = -c * c - 4.0 * a * a * (1.0 - a * tau) ** 2
    return CmcConstants(b=b, b1=b1, b2=b2, b3=b3, c1=c1, c2=c2, c=c, H=H)


def select_case(
    space: BcvSpace,
    H: float,
    a: float = 0.0,
    c: float = 0.0,
    tol: Tolerances = DEFAULT_TOL,
) -> CmcCase:
    """Dispatch (kappa, tau, H) to the solution case, band eps = tol.case_band.

    The hyperbolic sub-branch needs the constants, hence the optional (a, c);
    with the defaults the cosh branch results, which is the only branch real
    parameters can reach (see module docstring).
    """
    eps = tol.case_band
    kappa, tau = space.kappa, space.tau
    if abs(kappa - 4.0 * tau * tau) <= eps:
        if abs(H) <= eps and abs(tau) <= eps and abs(kappa) <= eps:
            return CmcCase.EUCLIDEAN_MINIMAL
        return CmcCase.SPACE_FORM_GENERIC
    nu = H * H + kappa
    if abs(nu) <= eps:
        return CmcCase.CRITICAL_KAPPA
    if nu > 0.0:
        return CmcCase.OSCILLATORY
    k = cmc_constants(space, a, H, c)
    disc = k.b1 * k.b1 + k.b * nu
    if abs(disc) <= eps:
        raise DegenerateFamily(
            f"hyperbolic sub-branch discriminant {disc:.3e} within the case band: "
            "constant-sqrt(Delta) solution, not covered by the closed forms"
        )
    return CmcCase.HYPERBOLIC_COSH if disc > 0.0 else CmcCase.HYPERBOLIC_SINH


def _u_from_squared(
    f2: Callable[[float], float],
    df2: Callable[[float], float],
    d2f2: Callable[[float], float],
) -> SmoothFunction:
    def f(u: float) -> float:
        v = f2(u)
        if v <= 0.0:
            raise DomainError(f"U^2(u={u}) = {v:.6e} <= 0")
        return math.sqrt(v)

    def df(u: float) -> float:
        return df2(u) / (2.0 * f(u))

    def d2f(u: float) -> float:
        Uv = f(u)
        dU = df2(u) / (2.0 * Uv)
        return (d2f2(u) - 2.0 * dU * dU) / (2.0 * Uv)

    sf = SmoothFunction(f, df, d2f)
    sf.squared = (f2, df2, d2f2)
    return sf


def _family_domain(
    m: float,
    a: float,
    U2: Callable[[float], float],
    extra: Optional[Callable[[float], bool]],
    window: tuple[float, float],
    tol: Tolerances,
    freq: float = 0.0,
) -> tuple[float, float]:
    """Maximal subinterval of window where U^2 > 0, m^2 U^2 >= a^2, and the
    case's signed sqrt(Delta) expression is admissible; anchored at the best
    valid scan point.  The scan density follows the family's oscillation
    frequency so touching arch boundaries cannot slip between samples."""

    def ok(u: float) -> bool:
        try:
            v = U2(u)
        except Exception:
            return False
        if not (math.isfinite(v) and v > 0.0):
            return False
        if m * m * v - a * a < -tol.radicand_clamp:
            return False
        return extra(u) if extra is not None else True

    lo, hi = window
    n = max(4097, 1 + int(512.0 * (hi - lo) * freq / (2.0 * math.pi)))
    best_u, best_margin = None, -math.inf
    for i in range(n):
        u = lo + (hi - lo) * i / (n - 1)
        if ok(u):
            margin = m * m * U2(u) - a * a
            if margin > best_margin:
                best_u, best_margin = u, margin
    if best_u is None:
        raise NoRealFamily(
            f"U^2 admits no valid point in the window [{lo}, {hi}]"
        )
    step = (hi - lo) / (n - 1)
    right, u = hi, best_u
    while u < hi:
        nxt = min(u + step, hi)
        if not ok(nxt):
            while nxt - u > tol.bisect:
                mid = 0.5 * (u + nxt)
                if ok(mid):
                    u = mid
                else:
                    nxt = mid
            right = u
            break
        u = nxt
    left, u = lo, best_u
    while u > lo:
        nxt = max(u - step, lo)
        if not ok(nxt):
            while u - nxt > tol.bisect:
                mid = 0.5 * (u + nxt)
                if ok(mid):
                    u = mid
                else:
                    nxt = mid
            left = u
            break
        u = nxt
    return left, right


_ARCH_FLOOR = 1e-4  # relative inset from sqrt(Delta) = 0 arch boundaries


def _build_case(
    space: BcvSpace,
    m: float,
    a: float,
    H: float,
    c: float,
    case: CmcCase,
    tol: Tolerances,
):
    """U^2 closed form with analytic derivatives plus the admissibility test.

    Admissibility cuts the u-line down to one branch of the actual CMC-H
    solution: sqrt(Delta) must stay on its positive arch (Delta = 0 is a
    genuine chart degeneration), and for H != 0 the first integral
    y = (H sqrt(Delta) + c)/(4 tau^2 - kappa)  (resp. (H x^2 + c)/(2 sqrt(D))
    in the space forms) must be nonnegative -- on arcs where it is negative
    the profile sweeps a surface of mean curvature -H, not H.
    """
    kappa, tau = space.kappa, space.tau
    k = cmc_constants(space, a, H, c)
    m2 = m * m
    has_h = abs(H) > tol.case_band

    if case is CmcCase.EUCLIDEAN_MINIMAL:
        U2 = lambda u: (u * u + a * a + 0.25 * c * c) / m2
        dU2 = lambda u: 2.0 * u / m2
        d2U2 = lambda u: 2.0 / m2
        return U2, dU2, d2U2, None, 0.0

    if case is CmcCase.SPACE_FORM_GENERIC:
        if 1.0 - 2.0 * a * tau <= 0.0:
            raise ParameterOutOfRange(
                f"space-form branch needs 1 - 2 a tau > 0, got {1 - 2 * a * tau}"
            )
        lam = H * H + 4.0 * tau * tau
        amp_sq = k.c1 * k.c1 + k.c2 * lam
        if amp_sq < -tol.radicand_clamp:
            raise NoRealFamily(
                f"c1^2 + c2 (H^2 + 4 tau^2) = {amp_sq:.6e} < 0: no real family"
            )
        amp = math.sqrt(max(amp_sq, 0.0))
        rl = math.sqrt(lam)
        U2 = lambda u: (k.c1 + amp * math.sin(rl * u)) / (m2 * lam)
        dU2 = lambda u: amp * rl * math.cos(rl * u) / (m2 * lam)
        d2U2 = lambda u: -amp * math.sin(rl * u) / m2
        extra = (lambda u: H * m2 * U2(u) + c >= 0.0) if has_h else None
        return U2, dU2, d2U2, extra, rl

    if case is CmcCase.CRITICAL_KAPPA:
        # proof-variant constants (stable on the band kappa ~ -H^2):
        # b1 = 2 a tau H^2 + 4 tau^2 - c H, numerator constant a^2 H^2 + 4 a tau - 1
        b1 = 2.0 * a * tau * H * H + 4.0 * tau * tau - c * H
        if b1 == 0.0:
            raise DegenerateFamily(
                "b1 = 0: sqrt(Delta) is linear in u, not covered by the closed forms"
            )
        b2 = -k.b / (2.0 * b1)
        b3p = a * a * H * H + 4.0 * a * tau - 1.0
        mu = 4.0 * tau * tau + H * H
        w = lambda u: 0.5 * b1 * u * u + b2
        U2 = lambda u: (w(u) ** 2 + b3p) / (m2 * mu)
        dU2 = lambda u: 2.0 * w(u) * b1 * u / (m2 * mu)
        d2U2 = lambda u: 2.0 * b1 * (1.5 * b1 * u * u + b2) / (m2 * mu)
        floor = _ARCH_FLOOR * max(abs(b1), abs(b2), 1.0)

        def extra(u: float) -> bool:
            sd = w(u)
            if sd < floor:
                return False
            if has_h and (H * sd + c) / (4.0 * tau * tau - kappa) < 0.0:
                return False
            return True

        return U2, dU2, d2U2, extra, math.sqrt(abs(b1))

    nu = H * H + kappa
    denom = m2 * (4.0 * tau * tau - kappa) * nu * nu
    disc = k.b1 * k.b1 + k.b * nu

    if case is CmcCase.OSCILLATORY:
        if disc < -tol.radicand_clamp:
            raise NoRealFamily(f"b1^2 + b (H^2+kappa) = {disc:.6e} < 0")
        S = math.sqrt(max(disc, 0.0))
        rn = math.sqrt(nu)
        w = lambda u: k.b1 + S * math.sin(rn * u)
        dw = lambda u: S * rn * math.cos(rn * u)
        d2w = lambda u: -S * nu * math.sin(rn * u)
    elif case is CmcCase.HYPERBOLIC_COSH:
        if disc <= tol.case_band:
            raise DegenerateFamily(f"cosh branch needs b1^2 + b nu > 0, got {disc:.3e}")
        S = math.sqrt(disc)
        beta = math.sqrt(-nu)  # beta^2 = -nu, so w'' = -S beta^2 cosh = S nu cosh
        w = lambda u: k.b1 - S * math.cosh(beta * u)
        dw = lambda u: -S * beta * math.sinh(beta * u)
        d2w = lambda u: S * nu * math.cosh(beta * u)
    elif case is CmcCase.HYPERBOLIC_SINH:
        if disc >= -tol.case_band:
            raise DegenerateFamily(f"sinh branch needs b1^2 + b nu < 0, got {disc:.3e}")
        Sb = math.sqrt(-disc)
        S = Sb
        beta = math.sqrt(-nu)
        w = lambda u: k.b1 - Sb * math.sinh(beta * u)
        dw = lambda u: -Sb * beta * math.cosh(beta * u)
        d2w = lambda u: Sb * nu * math.sinh(beta * u)
    else:  # pragma: no cover
        raise ValueError(f"unhandled case {case}")

    U2 = lambda u: (nu * nu * k.b3 + w(u) ** 2) / denom
    dU2 = lambda u: 2.0 * w(u) * dw(u) / denom
    d2U2 = lambda u: 2.0 * (dw(u) ** 2 + w(u) * d2w(u)) / denom
    floor = _ARCH_FLOOR * (abs(k.b1) + S) / abs(nu)

    def extra(u: float) -> bool:
        sd = w(u) / nu  # the family's sqrt(Delta)
        if sd < floor:
            return False
        if has_h and (H * sd + c) / (4.0 * tau * tau - kappa) < 0.0:
            return False
        return True

    return U2, dU2, d2U2, extra, math.sqrt(abs(nu))


def cmc_U(
    space: BcvSpace,
    m: float,
    a: float,
    H: float,
    c: float,
    u_window: tuple[float, float] = (-10.0, 10.0),
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[SmoothFunction, CmcCase]:
    """Metric profile U of the CMC-H Bour family for integration constant c.

    U carries analytic first and second derivatives and a ``domain``
    attribute: the maximal subinterval of u_window where U^2 > 0,
    m^2 U^2 >= a^2, and the case's sqrt(Delta) branch is admissible.
    Phases are zero; shifted members compose with u -> u - u0.
    """
    if m == 0:
        raise ValueError("m must be nonzero")
    case = select_case(space, H, a, c, tol)
    U2, dU2, d2U2, extra, freq = _build_case(space, m, a, H, c, case, tol)
    domain = _family_domain(m, a, U2, extra, u_window, tol, freq)
    U = _u_from_squared(U2, dU2, d2U2)
    U.domain = domain
    return U, case


def _check_range(name: str, value: float, bound: float):
    if not abs(value) < bound:
        raise ParameterOutOfRange(
            f"|{name}| = {abs(value)} must be < {bound} for this space"
        )


def minimal_U(
    space: BcvSpace,
    m: float,
    a: float,
    c: float,
    u_window: tuple[float, float] = (-10.0, 10.0),
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[SmoothFunction, SpaceClass]:
    """Metric profile of the helicoidal minimal surfaces, per space class.

    These are the H = 0 members written per classify(space); each enforces
    its stated parameter constraint.  The sphere case uses the form derived
    from the H = 0 specialization of the generic space-form family
    (mean 1 + (1-2 a tau)^2 and doubled amplitude); the one commonly quoted
    with mean 1 - a tau fails the minimal-surface equation (see tests).
    """
    if m == 0:
        raise ValueError("m must be nonzero")
    kappa, tau = space.kappa, space.tau
    cls = classify(space)
    m2 = m * m
    extra = None
    freq = math.sqrt(abs(kappa)) + 2.0 * abs(tau)

    if cls is SpaceClass.EUCLIDEAN:
        U2 = lambda u: (u * u + a * a + 0.25 * c * c) / m2
        dU2 = lambda u: 2.0 * u / m2
        d2U2 = lambda u: 2.0 / m2

    elif cls is SpaceClass.SPHERE:
        if 1.0 - 2.0 * a * tau <= 0.0:
            raise ParameterOutOfRange(
                f"sphere family needs 1 - 2 a tau > 0, got {1 - 2 * a * tau}"
            )
        _check_range("c", c, abs(1.0 / tau - 2.0 * a))
        mean = 1.0 + (1.0 - 2.0 * a * tau) ** 2
        amp = 2.0 * math.sqrt((1.0 - 2.0 * a * tau) ** 2 - tau * tau * c * c)
        den = 4.0 * m2 * tau * tau
        U2 = lambda u: (mean + amp * math.sin(2.0 * tau * u)) / den
        dU2 = lambda u: amp * 2.0 * tau * math.cos(2.0 * tau * u) / den
        d2U2 = lambda u: -amp * 4.0 * tau * tau * math.sin(2.0 * tau * u) / den

    elif cls is SpaceClass.SPHERE_PRODUCT:
        _check_range("c", c, math.sqrt(kappa))
        rk = math.sqrt(kappa)
        den = m2 * kappa * kappa
        const = kappa * (a * a * kappa + 1.0)
        U2 = lambda u: (const + (c * c - kappa) * math.sin(rk * u) ** 2) / den
        dU2 = lambda u: (c * c - kappa) * rk * math.sin(2.0 * rk * u) / den
        d2U2 = lambda u: (c * c - kappa) * 2.0 * kappa * math.cos(2.0 * rk * u) / den
        # sqrt(Delta) is proportional to sin(sqrt(kappa) u): stay on one arch
        extra = lambda u: math.sin(rk * u) >= _ARCH_FLOOR

    elif cls is SpaceClass.HYPERBOLIC_PRODUCT:
        bk = math.sqrt(-kappa)
        den = m2 * kappa * kappa
        const = kappa * (a * a * kappa + 1.0)
        U2 = lambda u: (const + (c * c - kappa) * math.cosh(bk * u) ** 2) / den
        dU2 = lambda u: (c * c - kappa) * bk * math.sinh(2.0 * bk * u) / den
        d2U2 = lambda u: (c * c - kappa) * (-2.0 * kappa) * math.cosh(2.0 * bk * u) / den

    elif cls is SpaceClass.HEISENBERG:
        den = 4.0 * m2 * tau * tau
        w = lambda u: 2.0 * tau * tau * u * u + 1.0 - 2.0 * a * tau + c * c / (8.0 * tau * tau)
        U2 = lambda u: (w(u) ** 2 + 4.0 * a * tau - 1.0) / den
        dU2 = lambda u: 2.0 * w(u) * 4.0 * tau * tau * u / den
        d2U2 = lambda u: (2.0 * (4.0 * tau * tau * u) ** 2 + 8.0 * tau * tau * w(u)) / den
        extra = lambda u: w(u) >= _ARCH_FLOOR * max(abs(w(0.0)), 1.0)

    else:  # SU2 or SL2R-cover
        if cls is SpaceClass.SU2:
            _check_range("c", c, abs(4.0 * tau * tau - kappa) / math.sqrt(kappa))
        S = math.sqrt((4.0 * tau * tau - kappa) ** 2 - c * c * kappa)
        bhat = 4.0 * tau * tau - 2.0 * a * kappa * tau
        den = m2 * kappa * kappa * (4.0 * tau * tau - kappa)
        b3 = 4.0 * a * tau - a * a * kappa - 1.0
        if cls is SpaceClass.SU2:
            rk = math.sqrt(kappa)
            w = lambda u: bhat + S * math.sin(rk * u)
            dw = lambda u: S * rk * math.cos(rk * u)
            d2w = lambda u: -S * kappa * math.sin(rk * u)
        else:
            bk = math.sqrt(-kappa)  # bk^2 = -kappa, so w'' = -S bk^2 cosh = S kappa cosh
            w = lambda u: bhat - S * math.cosh(bk * u)
            dw = lambda u: -S * bk * math.sinh(bk * u)
            d2w = lambda u: S * kappa * math.cosh(bk * u)
        U2 = lambda u: (kappa * kappa * b3 + w(u) ** 2) / den
        dU2 = lambda u: 2.0 * w(u) * dw(u) / den
        d2U2 = lambda u: 2.0 * (dw(u) ** 2 + w(u) * d2w(u)) / den
        floor = _ARCH_FLOOR * (abs(bhat) + S) / abs(kappa)
        extra = lambda u: w(u) / kappa >= floor

    domain = _family_domain(m, a, U2, extra, u_window, tol, freq)
    U = _u_from_squared(U2, dU2, d2U2)
    U.domain = domain
    return U, cls


def _eq_principal_pieces(space: BcvSpace, seed: BourSeed, u: float, tol: Tolerances):
    kappa, tau = space.kappa, space.tau
    m, a = seed.m, seed.a
    Uv = seed.U(u)
    dU = seed.U.deriv(u)
    d2U = seed.U.second(u)
    m2U2 = m * m * Uv * Uv
    d = (1.0 - 2.0 * a * tau) ** 2 + (m2U2 - a * a) * (4.0 * tau * tau - kappa)
    if d <= 0.0:
        raise NegativeDiscriminant(f"Delta = {d:.6e} <= 0 at u={u}")
    sd = math.sqrt(d)
    den = (1.0 + sd) ** 2 - 4.0 * tau * tau * m2U2
    if den <= 0.0:
        raise DomainError(f"radius denominator {den:.6e} <= 0 at u={u}")
    B = 2.0 * (1.0 - 2.0 * a * tau + sd) / den
    return Uv, dU, d2U, m2U2, d, sd, den, B


def cmc_residual(
    space: BcvSpace,
    seed: BourSeed,
    H: float,
    u: float,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """LHS - RHS of the constant-mean-curvature equation at u.

    Zero along exact CMC-H families.  U'' comes from the seed's profile
    (analytic for all closed-form families).
    """
    kappa, tau = space.kappa, space.tau
    m, a = seed.m, seed.a
    Uv, dU, d2U, m2U2, d, sd, den, B = _eq_principal_pieces(space, seed, u, tol)
    rad = 4.0 * (m2U2 - a * a) / den - m ** 4 * B * B * Uv * Uv * dU * dU / d
    if rad < 0.0:
        if rad < -tol.radicand_clamp:
            raise NegativeRadicand(f"mean-curvature radicand {rad:.6e} < 0 at u={u}")
        rad = 0.0
    lhs = H * math.sqrt(rad)
    # (U U' / sqrt(D))' = (U'^2 + U U'')/sqrt(D) - (4 tau^2-kappa) m^2 U^2 U'^2 / D^(3/2)
    dterm = (dU * dU + Uv * d2U) / sd - (4.0 * tau * tau - kappa) * m * m * Uv * Uv * dU * dU / (
        d * sd
    )
    rhs = 2.0 - B - m * m * B * dterm
    return lhs - rhs


def first_integral_check(
    space: BcvSpace,
    seed: BourSeed,
    H: float,
    c: float,
    u: float,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """y from the coordinate transform minus y from the first integral.

    The transform sets x = m U and
    y = sqrt( (x^2-a^2)((1+sqrt(D))^2 - 4 tau^2 x^2)/(1 - 2 a tau + sqrt(D))^2
              - x^2 x'^2 / D ),
    while integrating y' = H x x'/sqrt(D) gives (H x^2 + c)/(2 sqrt(D)) in
    the space-form case and (H sqrt(D) + c)/(4 tau^2 - kappa) otherwise.
    Zero along exact families wherever the integrated y is nonnegative.
    """
    kappa, tau = space.kappa, space.tau
    m, a = seed.m, seed.a
    Uv, dU, d2U, m2U2, d, sd, den, B = _eq_principal_pieces(space, seed, u, tol)
    x = m * Uv
    dx = m * dU
    rad = (x * x - a * a) * den / (1.0 - 2.0 * a * tau + sd) ** 2 - x * x * dx * dx / d
    if rad < 0.0:
        if rad < -tol.radicand_clamp:
            raise NegativeRadicand(f"first-integral radicand {rad:.6e} < 0 at u={u}")
        rad = 0.0
    y_tc = math.sqrt(rad)
    if abs(4.0 * tau * tau - kappa) <= tol.case_band:
        y_sol = (H * x * x + c) / (2.0 * sd)
    else:
        y_sol = (H * sd + c) / (4.0 * tau * tau - kappa)
    return y_tc - y_sol


def z_ode_residual(
    space: BcvSpace,
    seed: BourSeed,
    H: float,
    c: float,
    u: float,
) -> float:
    """Space-form branch check: z = (m U)^2 satisfies
    z'^2 = -(H^2 + 4 tau^2) z^2 + 2 c1 z + c2."""
    a = seed.a
    k = cmc_constants(space, a, H, c)
    m2 = seed.m * seed.m
    Uv = seed.U(u)
    dU = seed.U.deriv(u)
    z = m2 * Uv * Uv
    dz = 2.0 * m2 * Uv * dU
    lam = H * H + 4.0 * space.tau * space.tau
    return dz * dz - (-lam * z * z + 2.0 * k.c1 * z + k.c2)


def sqrt_delta_ode_residual(
    space: BcvSpace,
    seed: BourSeed,
    H: float,
    c: float,
    u: float,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """Non-space-form branch check:
    (sqrt(D))'^2 = -(H^2+kappa) D + 2 b1 sqrt(D) + b along the family."""
    kappa, tau = space.kappa, space.tau
    m, a = seed.m, seed.a
    k = cmc_constants(space, a, H, c)
    Uv = seed.U(u)
    dU = seed.U.deriv(u)
    m2U2 = m * m * Uv * Uv
    d = (1.0 - 2.0 * a * tau) ** 2 + (m2U2 - a * a) * (4.0 * tau * tau - kappa)
    if d <= 0.0:
        raise NegativeDiscriminant(f"Delta = {d:.6e} <= 0 at u={u}")
    sd = math.sqrt(d)
    dsd = (4.0 * tau * tau - kappa) * m * m * Uv * dU / sd
    nu = H * H + kappa
    return dsd * dsd - (-nu * d + 2.0 * k.b1 * sd + k.b)
