"""BCV spaces: metrics, frames, Killing fields, and numerical Christoffels.

The two-parameter metric family

    g = (dx^2 + dy^2)/B^2 + (dz + tau (y dx - x dy)/B)^2,
    B = 1 + (kappa/4)(x^2 + y^2),

is defined on the open subset of R^3 where B > 0.  Christoffel symbols are
obtained from central finite differences of the metric (with one Richardson
level) rather than hand-coded closed forms, so the extrinsic oracle stays
independent of any algebra shared with the main pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .numerics import DEFAULT_TOL, Tolerances

__all__ = [
    "BcvSpace",
    "AmbientPoint",
    "CylPoint",
    "SpaceClass",
    "scaling_factor",
    "metric_cartesian",
    "metric_cylindrical",
    "orthonormal_frame",
    "killing_basis",
    "christoffels",
    "classify",
    "killing_residual",
]


class SpaceClass(Enum):
    EUCLIDEAN = "Euclidean"
    SPHERE = "Sphere"
    SPHERE_PRODUCT = "SphereProduct"
    HYPERBOLIC_PRODUCT = "HyperbolicProduct"
    HEISENBERG = "Heisenberg"
    SU2 = "SU2"
    SL2R_COVER = "SL2R-cover"


@dataclass(frozen=True)
class BcvSpace:
    """The pair (kappa, tau) selecting one metric of the family."""

    kappa: float
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and math.isfinite(self.tau)):
            raise ValueError("kappa and tau must be finite")

    def B(self, rsq: float) -> float:
        return scaling_factor(self, rsq)

    @property
    def max_radius(self) -> float:
        """Radius of the domain boundary (inf unless kappa < 0)."""
        if self.kappa >= 0:
            return math.inf
        return 2.0 / math.sqrt(-self.kappa)


@dataclass(frozen=True)
class AmbientPoint:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def to_cylindrical(self) -> "CylPoint":
        return CylPoint(math.hypot(self.x, self.y), math.atan2(self.y, self.x), self.z)


@dataclass(frozen=True)
class CylPoint:
    r: float
    theta: float
    z: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"r must be >= 0, got {self.r}")

    def to_cartesian(self) -> AmbientPoint:
        return AmbientPoint(self.r * math.cos(self.theta), self.r * math.sin(self.theta), self.z)


def _xyz(p) -> tuple[float, float, float]:
    if isinstance(p, AmbientPoint):
        return p.x, p.y, p.z
    if isinstance(p, CylPoint):
        q = p.to_cartesian()
        return q.x, q.y, q.z
    x, y, z = (float(c) for c in p)
    return x, y, z


def scaling_factor(space: BcvSpace, rsq: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """B = 1 + (kappa/4) rsq with the domain guard B >= margin."""
    if rsq < 0:
        raise ValueError(f"rsq must be >= 0, got {rsq}")
    B = 1.0 + 0.25 * space.kappa * rsq
    if B < tol.domain_margin:
        raise DomainError(
            f"point outside the metric domain: B={B:.3e} at r^2={rsq} "
            f"(kappa={space.kappa})"
        )
    return B


def metric_cartesian(space: BcvSpace, p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Metric components in (x, y, z); symmetric positive definite."""
    x, y, z = _xyz(p)
    B = scaling_factor(space, x * x + y * y, tol)
    # one-form dz + alpha dx + beta dy
    alpha = space.tau * y / B
    beta = -space.tau * x / B
    invB2 = 1.0 / (B * B)
    return np.array(
        [
            [invB2 + alpha * alpha, alpha * beta, alpha],
            [alpha * beta, invB2 + beta * beta, beta],
            [alpha, beta, 1.0],
        ]
    )


def metric_cylindrical(space: BcvSpace, p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Metric components in (r, theta, z).

    Defined at r = 0 as well (g_thth = 0 there), but the matrix is singular
    on the axis; callers needing invertibility keep r >= tol.r_min.
    """
    if isinstance(p, CylPoint):
        r = p.r
    else:
        r, _, _ = (float(c) for c in p)
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    rsq = r * r
    B = scaling_factor(space, rsq, tol)
    tau = space.tau
    return np.array(
        [
            [1.0 / (B * B), 0.0, 0.0],
            [0.0, rsq * (1.0 + tau * tau * rsq) / (B * B), -tau * rsq / B],
            [0.0, -tau * rsq / B, 1.0],
        ]
    )


def orthonormal_frame(space: BcvSpace, p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The global orthonormal frame E1, E2, E3 as rows of coordinate components."""
    x, y, z = _xyz(p)
    B = scaling_factor(space, x * x + y * y, tol)
    tau = space.tau
    return np.array(
        [
            [B, 0.0, -tau * y],
            [0.0, B, tau * x],
            [0.0, 0.0, 1.0],
        ]
    )


def killing_basis(space: BcvSpace, p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The four Killing fields X1..X4 as rows of coordinate components.

    Frame components are converted to coordinate components eagerly; vectors
    live in one representation throughout.
    """
    x, y, z = _xyz(p)
    B = scaling_factor(space, x * x + y * y, tol)
    kappa, tau = space.kappa, space.tau
    E = orthonormal_frame(space, p, tol)
    coeffs = np.array(
        [
            [1.0 - kappa * y * y / (2 * B), kappa * x * y / (2 * B), 2 * tau * y / B],
            [kappa * x * y / (2 * B), 1.0 - kappa * x * x / (2 * B), -2 * tau * x / B],
            [-y / B, x / B, -tau * (x * x + y * y) / B],
            [0.0, 0.0, 1.0],
        ]
    )
    return coeffs @ E


def classify(space: BcvSpace) -> SpaceClass:
    """Simply connected model of the isometry class of (kappa, tau)."""
    kappa, tau = space.kappa, space.tau
    if kappa == 0.0 and tau == 0.0:
        return SpaceClass.EUCLIDEAN
    if kappa == 4.0 * tau * tau:
        return SpaceClass.SPHERE
    if tau == 0.0:
        return SpaceClass.SPHERE_PRODUCT if kappa > 0 else SpaceClass.HYPERBOLIC_PRODUCT
    if kappa == 0.0:
        return SpaceClass.HEISENBERG
    return SpaceClass.SU2 if kappa > 0 else SpaceClass.SL2R_COVER


def christoffels(
    space: BcvSpace,
    p,
    h: float = 1e-4,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Gamma^k_{ij} from finite differences of the Cartesian metric.

    Central differences with one Richardson level; symmetric in (i, j) by
    construction.  Step h is configurable; the stencil must stay strictly
    inside the domain (DomainError otherwise).
    """
    x0 = np.array(_xyz(p), dtype=float)

    def g_at(offset_axis: int, step: float) -> np.ndarray:
        q = x0.copy()
        q[offset_axis] += step
        return metric_cartesian(space, q, tol)

    dg = np.empty((3, 3, 3))  # dg[l, i, j] = d_l g_ij
    for axis in range(3):
        d_h = (g_at(axis, h) - g_at(axis, -h)) / (2.0 * h)
        d_h2 = (g_at(axis, 0.5 * h) - g_at(axis, -0.5 * h)) / h
        dg[axis] = (4.0 * d_h2 - d_h) / 3.0
    g = metric_cartesian(space, x0, tol)
    g_inv = np.linalg.inv(g)
    # Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij); dg[a,b,c] = d_a g_bc
    term = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
    gamma = 0.5 * np.einsum("kl,ijl->kij", g_inv, term)
    return gamma


def killing_residual(
    space: BcvSpace,
    p,
    k: int,
    h: float = DEFAULT_TOL.fd_first,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """Max |nabla_i X_j + nabla_j X_i| for the k-th Killing field at p.

    The covariant components X_j = g_jl X^l are differentiated numerically;
    Christoffel terms come from ``christoffels``.  Zero (to tolerance) iff
    X_k generates isometries.
    """
    x0 = np.array(_xyz(p), dtype=float)

    def lowered(q: np.ndarray) -> np.ndarray:
        return metric_cartesian(space, q, tol) @ killing_basis(space, q, tol)[k]

    dX = np.empty((3, 3))  # dX[i, j] = d_i X_j
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = 1.0
        d_h = (lowered(x0 + h * e) - lowered(x0 - h * e)) / (2.0 * h)
        d_h2 = (lowered(x0 + 0.5 * h * e) - lowered(x0 - 0.5 * h * e)) / h
        dX[axis] = (4.0 * d_h2 - d_h) / 3.0
    gamma = christoffels(space, x0, tol=tol)
    X_low = lowered(x0)
    nabla = dX - np.einsum("kij,k->ij", gamma, X_low)
    return float(np.max(np.abs(nabla + nabla.T)))
