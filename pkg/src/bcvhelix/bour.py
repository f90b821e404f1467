"""Two-parameter isometry families of helicoidal surfaces.

From a positive metric profile U(u) and constants (m != 0, a), the natural
chart of a helicoidal surface with first fundamental form du^2 + U^2 dt^2 is

    xi1 = 2 sqrt( (m^2 U^2 - a^2) / ((1 + sqrt(D))^2 - 4 tau^2 m^2 U^2) ),
    xi2 = int  m U (4 + kappa xi1^2) / (4 xi1^2) * sqrt(R) du,
    theta(u, t) = t/m + int ((4 tau - a kappa) xi1^2 - 4 a)
                            / (4 m U xi1^2) * sqrt(R) du,

with D = (1 - 2 a tau)^2 + (m^2 U^2 - a^2)(4 tau^2 - kappa) and radicand
R = xi1^2 - m^4 U^2 U'^2 (4 + kappa xi1^2)^2 / (16 D).  All members with the
same U are mutually isometric; a = 0 gives the rotational member.

Sign conventions: m > 0 with the positive square-root branch throughout
(seeds with m < 0 are normalized, a theta-orientation flip being an ambient
isometry); integration constants fix xi2(u0) = theta0(u0) = 0 at the domain
midpoint u0 (vertical translations and rotations are ambient isometries).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import (
    DegenerateOrbit,
    DegenerateRadius,
    DomainError,
    EmptyDomain,
    NegativeDiscriminant,
    NegativeRadicand,
)
from .numerics import (
    DEFAULT_TOL,
    CumulativeQuadrature,
    SmoothFunction,
    Tolerances,
)
from .orbit import HelicoidalAction, ProfileCurve, volume_omega
from .spaces import BcvSpace

__all__ = [
    "BourSeed",
    "NaturalChart",
    "delta",
    "xi1_from_seed",
    "xi2_integrand",
    "theta0_integrand",
    "build_chart",
    "domain_of_validity",
    "natural_from_helicoidal",
    "rotation_chart",
    "euclidean_xi1",
    "euclidean_xi2_integrand",
    "euclidean_theta0_integrand",
]


@dataclass(frozen=True)
class BourSeed:
    """The data (U, m, a) generating one member of a Bour isometry family.

    U must be positive on u_domain and is carried with its derivative
    (finite-difference fallback when no analytic one is supplied).  m < 0 is
    normalized to |m|: the flip t -> -t composed with the ambient isometry
    (theta, z) -> (-theta, -z) maps the two surfaces onto each other.
    """

    U: SmoothFunction
    m: float
    a: float
    u_domain: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "U", SmoothFunction.wrap(self.U))
        if self.m == 0 or not math.isfinite(self.m):
            raise ValueError("m must be finite and nonzero")
        if self.m < 0:
            object.__setattr__(self, "m", -self.m)
        lo, hi = self.u_domain
        if not lo < hi:
            raise ValueError(f"empty u_domain {self.u_domain}")


def delta(space: BcvSpace, seed: BourSeed, u: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Discriminant D(u) of the chart; raises NegativeDiscriminant below -clamp."""
    Uv = seed.U(u)
    m2U2 = seed.m * seed.m * Uv * Uv
    d = (1.0 - 2.0 * seed.a * space.tau) ** 2 + (m2U2 - seed.a * seed.a) * (
        4.0 * space.tau * space.tau - space.kappa
    )
    if d < 0.0:
        if d > -tol.radicand_clamp:
            return 0.0
        raise NegativeDiscriminant(f"Delta(u={u}) = {d:.6e} < 0")
    return d


def _chart_pieces(space: BcvSpace, seed: BourSeed, u: float, tol: Tolerances):
    """(U, U', m^2 U^2, Delta, sqrt(Delta), numerator, denominator, xi1^2)."""
    Uv = seed.U(u)
    dU = seed.U.deriv(u)
    m2U2 = seed.m * seed.m * Uv * Uv
    d = delta(space, seed, u, tol)
    sd = math.sqrt(d)
    num = m2U2 - seed.a * seed.a
    den = (1.0 + sd) ** 2 - 4.0 * space.tau * space.tau * m2U2
    if num < 0.0:
        if num < -tol.radicand_clamp:
            raise NegativeRadicand(f"m^2 U^2 - a^2 = {num:.6e} < 0 at u={u}")
        num = 0.0
    if den <= 0.0:
        if num <= tol.radicand_clamp:
            raise DegenerateRadius(
                f"radius formula degenerates at u={u} (num={num:.3e}, den={den:.3e})"
            )
        raise DomainError(f"(1+sqrt(D))^2 - 4 tau^2 m^2 U^2 = {den:.6e} <= 0 at u={u}")
    xi1sq = 4.0 * num / den
    return Uv, dU, m2U2, d, sd, num, den, xi1sq


def xi1_from_seed(
    space: BcvSpace, seed: BourSeed, u: float, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Profile radius xi1(u) = 2 sqrt(num/den)."""
    *_, xi1sq = _chart_pieces(space, seed, u, tol)
    return math.sqrt(xi1sq)


def _radicand(space: BcvSpace, seed: BourSeed, u: float, tol: Tolerances) -> tuple:
    Uv, dU, m2U2, d, sd, num, den, xi1sq = _chart_pieces(space, seed, u, tol)
    if d == 0.0:
        raise NegativeDiscriminant(f"Delta vanishes at u={u}: radicand undefined")
    q = (seed.m * seed.m * Uv * dU) ** 2
    sub = q * (4.0 + space.kappa * xi1sq) ** 2 / (16.0 * d)
    rad = xi1sq - sub
    # cancellation band: a radicand this small relative to its terms is the
    # boundary of validity (e.g. the helicoid's identically-zero radicand)
    band = max(tol.radicand_clamp, 4e-15 * (xi1sq + abs(sub)))
    if rad < band:
        if rad < -band:
            raise NegativeRadicand(f"xi2 radicand = {rad:.6e} < 0 at u={u}")
        rad = 0.0
    return Uv, xi1sq, rad


def xi2_integrand(
    space: BcvSpace, seed: BourSeed, u: float, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Integrand of the vertical coordinate xi2 of the profile curve."""
    Uv, xi1sq, rad = _radicand(space, seed, u, tol)
    if xi1sq == 0.0:
        raise DegenerateRadius(f"xi1 = 0 at u={u}: xi2 integrand singular")
    pref = seed.m * Uv * (4.0 + space.kappa * xi1sq) / (4.0 * xi1sq)
    return pref * math.sqrt(rad)


def theta0_integrand(
    space: BcvSpace, seed: BourSeed, u: float, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Integrand of the u-dependent gauge part of theta(u, t) = t/m + theta0(u)."""
    Uv, xi1sq, rad = _radicand(space, seed, u, tol)
    if xi1sq == 0.0:
        raise DegenerateRadius(f"xi1 = 0 at u={u}: theta integrand singular")
    pref = ((4.0 * space.tau - seed.a * space.kappa) * xi1sq - 4.0 * seed.a) / (
        4.0 * seed.m * Uv * xi1sq
    )
    return pref * math.sqrt(rad)


# Euclidean (kappa = tau = 0) specialization.  With B = Delta = 1 the general
# integrands above reduce to these expressions bit-for-bit (power-of-two
# factors only), which the test suite pins.

def euclidean_xi1(seed: BourSeed, u: float) -> float:
    Uv = seed.U(u)
    num = seed.m * seed.m * Uv * Uv - seed.a * seed.a
    if num < 0:
        raise NegativeRadicand(f"m^2 U^2 - a^2 = {num:.6e} < 0 at u={u}")
    return math.sqrt(num)


def _euclidean_rad(seed: BourSeed, u: float, tol: Tolerances) -> tuple:
    Uv = seed.U(u)
    dU = seed.U.deriv(u)
    xi1sq = seed.m * seed.m * Uv * Uv - seed.a * seed.a
    sub = (seed.m * seed.m * Uv * dU) ** 2
    rad = xi1sq - sub
    band = max(tol.radicand_clamp, 4e-15 * (xi1sq + abs(sub)))
    if rad < band:
        if rad < -band:
            raise NegativeRadicand(f"radicand = {rad:.6e} < 0 at u={u}")
        rad = 0.0
    return Uv, xi1sq, rad


def euclidean_xi2_integrand(seed: BourSeed, u: float, tol: Tolerances = DEFAULT_TOL) -> float:
    Uv, xi1sq, rad = _euclidean_rad(seed, u, tol)
    return seed.m * Uv / xi1sq * math.sqrt(rad)


def euclidean_theta0_integrand(seed: BourSeed, u: float, tol: Tolerances = DEFAULT_TOL) -> float:
    Uv, xi1sq, rad = _euclidean_rad(seed, u, tol)
    return -seed.a / (seed.m * Uv * xi1sq) * math.sqrt(rad)


def _valid_at(space: BcvSpace, seed: BourSeed, u: float, tol: Tolerances) -> bool:
    try:
        Uv = seed.U(u)
        if not (math.isfinite(Uv) and Uv > 0.0):
            return False
        dU = seed.U.deriv(u)
        if not math.isfinite(dU):
            return False
        m2U2 = seed.m * seed.m * Uv * Uv
        d = (1.0 - 2.0 * seed.a * space.tau) ** 2 + (m2U2 - seed.a * seed.a) * (
            4.0 * space.tau * space.tau - space.kappa
        )
        if d < -tol.radicand_clamp:
            return False
        d = max(d, 0.0)
        sd = math.sqrt(d)
        num = m2U2 - seed.a * seed.a
        if num < -tol.radicand_clamp:
            return False
        num = max(num, 0.0)
        den = (1.0 + sd) ** 2 - 4.0 * space.tau * space.tau * m2U2
        if den <= 0.0:
            return False
        if 1.0 - 2.0 * seed.a * space.tau + sd <= 0.0:  # B > 0
            return False
        xi1sq = 4.0 * num / den
        if d == 0.0:
            # acceptable only if the radicand prefactor vanishes too
            return (seed.m * seed.m * Uv * dU) == 0.0
        q = (seed.m * seed.m * Uv * dU) ** 2
        sub = q * (4.0 + space.kappa * xi1sq) ** 2 / (16.0 * d)
        # same cancellation band as the integrand evaluation
        return xi1sq - sub >= -max(tol.radicand_clamp, 4e-15 * (xi1sq + abs(sub)))
    except Exception:
        return False


def _edge_inward(pred: Callable[[float], bool], good: float, bad: float, tol: float) -> float:
    """Last predicate-true abscissa between good and bad, within tol, on the
    good side of the flip (so downstream evaluation never lands outside)."""
    while abs(bad - good) > tol:
        mid = 0.5 * (good + bad)
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def domain_of_validity(
    space: BcvSpace,
    seed: BourSeed,
    tol: Tolerances = DEFAULT_TOL,
    scan_points: int = 2049,
) -> tuple[float, float]:
    """Maximal subinterval of u_domain around its midpoint where the chart
    exists: Delta >= 0, m^2 U^2 >= a^2, positive radius denominator, B > 0,
    and the xi2 radicand >= 0.  Endpoints located by bisection to tol.bisect.
    """
    lo, hi = seed.u_domain
    u0 = 0.5 * (lo + hi)
    pred = lambda u: _valid_at(space, seed, u, tol)
    if not pred(u0):
        raise EmptyDomain(
            f"chart invalid at the u_domain midpoint u0={u0}; no validity interval"
        )
    step = (hi - lo) / (scan_points - 1)
    right = hi
    u = u0
    while u < hi:
        nxt = min(u + step, hi)
        if not pred(nxt):
            right = _edge_inward(pred, u, nxt, tol.bisect)
            break
        u = nxt
    left = lo
    u = u0
    while u > lo:
        nxt = max(u - step, lo)
        if not pred(nxt):
            left = _edge_inward(pred, u, nxt, tol.bisect)
            break
        u = nxt
    return left, right


@dataclass
class NaturalChart:
    """A natural parametrization (xi1, xi2, theta0) with its validity domain.

    xi2 and theta0 are quadrature-backed antiderivatives vanishing at u0;
    theta(u, t) = t/m + theta0(u).  Immutable after construction; evaluation
    is reentrant (per-u memo dicts hold deterministic values, so concurrent
    fills are benign).
    """

    space: BcvSpace
    seed: BourSeed
    u_valid: tuple[float, float]
    u0: float
    _xi1_fn: Callable[[float], float]
    _dxi1_fn: Callable[[float], float]
    _xi2_quad: CumulativeQuadrature
    _theta0_quad: CumulativeQuadrature
    _xi2_integrand: Callable[[float], float]
    _theta0_integrand: Callable[[float], float]
    _memo: dict = field(default_factory=dict, repr=False)

    def _check(self, u: float):
        lo, hi = self.u_valid
        if not (lo - 1e-12 <= u <= hi + 1e-12):
            raise DomainError(f"u={u} outside chart validity [{lo}, {hi}]")

    def xi1(self, u: float) -> float:
        self._check(u)
        return self._xi1_fn(u)

    def dxi1(self, u: float) -> float:
        self._check(u)
        return self._dxi1_fn(u)

    def xi2(self, u: float) -> float:
        self._check(u)
        key = ("x", u)
        v = self._memo.get(key)
        if v is None:
            v = self._xi2_quad(min(max(u, self.u_valid[0]), self.u_valid[1]))
            self._memo[key] = v
        return v

    def dxi2(self, u: float) -> float:
        self._check(u)
        return self._xi2_integrand(u)

    def theta0(self, u: float) -> float:
        self._check(u)
        key = ("t", u)
        v = self._memo.get(key)
        if v is None:
            v = self._theta0_quad(min(max(u, self.u_valid[0]), self.u_valid[1]))
            self._memo[key] = v
        return v

    def dtheta0(self, u: float) -> float:
        self._check(u)
        return self._theta0_integrand(u)

    def theta(self, u: float, t: float) -> float:
        return t / self.seed.m + self.theta0(u)

    @property
    def m(self) -> float:
        return self.seed.m

    @property
    def a(self) -> float:
        return self.seed.a

    @property
    def U(self) -> SmoothFunction:
        return self.seed.U

    def cylindrical(self, u: float, t: float) -> tuple[float, float, float]:
        """(r, theta, z) of the surface point at natural parameters (u, t)."""
        th = self.theta(u, t)
        return self.xi1(u), th, self.xi2(u) + self.seed.a * th

    def profile_curve(
        self,
        n: int = 2001,
        margin: float = 1e-6,
        u_range: Optional[tuple[float, float]] = None,
        tol: Tolerances = DEFAULT_TOL,
    ) -> ProfileCurve:
        """The profile curve as an arc-length ProfileCurve over the interior."""
        lo, hi = u_range if u_range is not None else self.u_valid
        lo, hi = lo + margin, hi - margin
        act = HelicoidalAction(self.space, self.seed.a)
        return ProfileCurve.from_functions(
            act, self.xi1, self.xi2, self.dxi1, self.dxi2, (lo, hi), n=n, tol=tol
        )


def _analytic_dxi1(space: BcvSpace, seed: BourSeed, tol: Tolerances) -> Callable[[float], float]:
    # xi1' = m^2 B^2 U U' / (sqrt(Delta) xi1), B = 1 + kappa xi1^2 / 4
    def dxi1(u: float) -> float:
        Uv, dU, m2U2, d, sd, num, den, xi1sq = _chart_pieces(space, seed, u, tol)
        if xi1sq == 0.0 or sd == 0.0:
            raise DegenerateRadius(f"xi1' singular at u={u}")
        B = 1.0 + 0.25 * space.kappa * xi1sq
        return seed.m * seed.m * B * B * Uv * dU / (sd * math.sqrt(xi1sq))

    return dxi1


def build_chart(space: BcvSpace, seed: BourSeed, tol: Tolerances = DEFAULT_TOL) -> NaturalChart:
    """Assemble the natural chart of the Bour family member given by seed."""
    u_valid = domain_of_validity(space, seed, tol)
    lo, hi = seed.u_domain
    u0 = 0.5 * (lo + hi)
    xi2_f = lambda u: xi2_integrand(space, seed, u, tol)
    th0_f = lambda u: theta0_integrand(space, seed, u, tol)
    return NaturalChart(
        space=space,
        seed=seed,
        u_valid=u_valid,
        u0=u0,
        _xi1_fn=lambda u: xi1_from_seed(space, seed, u, tol),
        _dxi1_fn=_analytic_dxi1(space, seed, tol),
        _xi2_quad=CumulativeQuadrature(xi2_f, u0, u_valid[0], u_valid[1], tol.quad_abs),
        _theta0_quad=CumulativeQuadrature(th0_f, u0, u_valid[0], u_valid[1], tol.quad_abs),
        _xi2_integrand=xi2_f,
        _theta0_integrand=th0_f,
    )


def natural_from_helicoidal(
    act: HelicoidalAction,
    curve: ProfileCurve,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[SmoothFunction, Callable[[float], float]]:
    """Natural reparametrization of the surface swept by an arc-length curve.

    Returns U(u) = omega(xi1(u)) and the gauge t_shift(u) with
    t = theta + t_shift(u), in which the induced metric is du^2 + U^2 dt^2.
    """
    lo, hi = curve.u_range
    u0 = 0.5 * (lo + hi)

    def U_fn(u: float) -> float:
        w = volume_omega(act, curve.xi1(u), tol)
        if w <= tol.r_min * tol.r_min:
            raise DegenerateOrbit(f"omega = {w:.3e} at u={u}")
        return w

    def shift_integrand(u: float) -> float:
        xi1 = curve.xi1(u)
        B = act.space.B(xi1 * xi1)
        w = act.a * B - act.space.tau * xi1 * xi1
        om_sq = (xi1 * xi1 + w * w) / (B * B)
        if om_sq <= 0:
            raise DegenerateOrbit(f"omega vanishes at u={u}")
        return curve.dxi2(u) * w / (B * om_sq)

    t_shift = CumulativeQuadrature(shift_integrand, u0, lo, hi, tol.quad_abs)
    return SmoothFunction(U_fn), t_shift


def rotation_chart(
    space: BcvSpace,
    n: float,
    U,
    u_domain: tuple[float, float],
    tol: Tolerances = DEFAULT_TOL,
) -> NaturalChart:
    """Rotational member via the a = 0 closed forms.

    Uses the dedicated rotation-surface formulas

        xi1 = 2 n U / sqrt(2 (1 + sqrt(D)) - kappa n^2 U^2),
        D = 1 + (4 tau^2 - kappa) n^2 U^2,

    with the xi2 and theta0 integrands written in the same reduced shape;
    agrees pointwise with build_chart at (m = n, a = 0).
    """
    seed = BourSeed(SmoothFunction.wrap(U), n, 0.0, u_domain)
    nn = seed.m
    u_valid = domain_of_validity(space, seed, tol)
    lo, hi = u_domain
    u0 = 0.5 * (lo + hi)
    kappa, tau = space.kappa, space.tau

    def pieces(u: float):
        Uv = seed.U(u)
        dU = seed.U.deriv(u)
        n2U2 = nn * nn * Uv * Uv
        d = 1.0 + (4.0 * tau * tau - kappa) * n2U2
        if d < 0.0:
            if d < -tol.radicand_clamp:
                raise NegativeDiscriminant(f"Delta = {d:.6e} < 0 at u={u}")
            d = 0.0
        sd = math.sqrt(d)
        den = 2.0 * (1.0 + sd) - kappa * n2U2
        if den <= 0.0:
            raise DomainError(f"rotation-chart denominator {den:.6e} <= 0 at u={u}")
        return Uv, dU, n2U2, d, sd, den

    def xi1_fn(u: float) -> float:
        Uv, dU, n2U2, d, sd, den = pieces(u)
        return 2.0 * nn * Uv / math.sqrt(den)

    def dxi1_fn(u: float) -> float:
        Uv, dU, n2U2, d, sd, den = pieces(u)
        xi1sq = 4.0 * n2U2 / den
        if xi1sq == 0.0 or sd == 0.0:
            raise DegenerateRadius(f"xi1' singular at u={u}")
        B = 1.0 + 0.25 * kappa * xi1sq
        return nn * nn * B * B * Uv * dU / (sd * math.sqrt(xi1sq))

    def xi2_f(u: float) -> float:
        Uv, dU, n2U2, d, sd, den = pieces(u)
        if d == 0.0:
            raise NegativeDiscriminant(f"Delta vanishes at u={u}")
        one = 1.0 + sd
        rad = one * one / den - nn * nn * one ** 4 * dU * dU / (d * den * den)
        if rad < 0.0:
            if rad < -tol.radicand_clamp:
                raise NegativeRadicand(f"rotation xi2 radicand {rad:.6e} at u={u}")
            rad = 0.0
        return math.sqrt(rad)

    def th0_f(u: float) -> float:
        Uv, dU, n2U2, d, sd, den = pieces(u)
        if d == 0.0:
            raise NegativeDiscriminant(f"Delta vanishes at u={u}")
        one = 1.0 + sd
        rad = 1.0 / den - nn * nn * one * one * dU * dU / (d * den * den)
        if rad < 0.0:
            if rad < -tol.radicand_clamp:
                raise NegativeRadicand(f"rotation theta radicand {rad:.6e} at u={u}")
            rad = 0.0
        return 2.0 * tau * math.sqrt(rad)

    return NaturalChart(
        space=space,
        seed=seed,
        u_valid=u_valid,
        u0=u0,
        _xi1_fn=xi1_fn,
        _dxi1_fn=dxi1_fn,
        _xi2_quad=CumulativeQuadrature(xi2_f, u0, u_valid[0], u_valid[1], tol.quad_abs),
        _theta0_quad=CumulativeQuadrature(th0_f, u0, u_valid[0], u_valid[1], tol.quad_abs),
        _xi2_integrand=xi2_f,
        _theta0_integrand=th0_f,
    )
