"""Shared numerical kernels.

Adaptive Gauss-Kronrod quadrature, cumulative (antiderivative-style)
quadrature with panel caching, central finite differences with one Richardson
level, and bisection for locating domain endpoints.  All kernels are
deterministic: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import heapq
import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import NoBracket, QuadratureFailure, StencilOutOfDomain

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "QuadResult",
    "SmoothFunction",
    "quad_adaptive",
    "CumulativeQuadrature",
    "diff_central",
    "bracket_root",
]


@dataclass(frozen=True)
class Tolerances:
    """One tolerance configuration threaded through all modules.

    The defaults are what every stated acceptance tolerance assumes.
    """

    quad_abs: float = 1e-10          # adaptive quadrature absolute tolerance
    quad_rel: float = 1e-10          # adaptive quadrature relative tolerance
    fd_first: float = 1e-5           # step for first derivatives
    fd_second: float = 1e-4          # step for second derivatives
    fd_min: float = 1e-7             # smallest step before StencilOutOfDomain
    brioschi_step: float = 2e-2      # step for the intrinsic-curvature stencil
    arclength: float = 1e-6          # per-sample arc-length residual gate
    radicand_clamp: float = 1e-12    # negative radicands above -clamp become 0
    domain_margin: float = 1e-9      # B below this counts as out of domain
    bisect: float = 1e-10            # endpoint location tolerance
    case_band: float = 1e-9          # CMC case-boundary band
    r_min: float = 1e-6              # cylindrical-axis guard for invertibility


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    panel_count: int


# 7-point Gauss / 15-point Kronrod node-weight pairs on [-1, 1] (QUADPACK dqk15).
_XGK = (
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
)
_WGK = (
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
)
_WG = (0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469)


def _kronrod_panel(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """One G7/K15 application on [lo, hi]: (K15 value, |K15-G7| estimate)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    fc = f(mid)
    kron = _WGK[7] * fc
    gauss = _WG[3] * fc
    for i in range(7):
        x = half * _XGK[i]
        fsum = f(mid - x) + f(mid + x)
        kron += _WGK[i] * fsum
        if i % 2 == 1:  # K15 odd indices are the G7 nodes
            gauss += _WG[i // 2] * fsum
    return kron * half, abs((kron - gauss) * half)


def _edge_mapped(f: Callable[[float], float], edge: float, inward: float):
    """Integrand of x = edge + sign*s^2: 2 s f(edge + sign*s^2).

    The substitution flattens square-root endpoint singularities.  When s^2
    underflows against edge, the evaluation point is nudged one float inward
    (that zone is never probed for the integrable class anyway).
    """
    direction = 1.0 if inward > edge else -1.0

    def g(s: float) -> float:
        x = edge + direction * s * s
        if x == edge and s != 0.0:
            x = math.nextafter(edge, inward)
        return 2.0 * s * f(x)

    return g


def quad_adaptive(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    abs_tol: float = DEFAULT_TOL.quad_abs,
    rel_tol: float = DEFAULT_TOL.quad_rel,
    max_panels: int = 4096,
) -> QuadResult:
    """Globally adaptive G7/K15 quadrature of ``f`` over [lo, hi].

    The two endpoint eighths are integrated under x = edge +- s^2, which
    turns integrable square-root endpoint singularities into smooth
    integrands; the worst-error panel is bisected until the summed estimate
    meets max(abs_tol, rel_tol*|value|).  Deterministic.  Raises
    QuadratureFailure at the panel cap.
    """
    if lo == hi:
        return QuadResult(0.0, 0.0, 1)
    sign = 1.0
    if hi < lo:
        lo, hi = hi, lo
        sign = -1.0
    w = (hi - lo) / 8.0
    s_w = math.sqrt(w)
    segments = (
        (_edge_mapped(f, lo, hi), 0.0, s_w),
        (f, lo + w, hi - w),
        (_edge_mapped(f, hi, lo), 0.0, s_w),
    )
    # heap entries (-err, seg_id, lo, hi, val, err); seg_id breaks ties
    heap = []
    total_val, total_err, n = 0.0, 0.0, 0
    for seg_id, (g, a, b) in enumerate(segments):
        val, err = _kronrod_panel(g, a, b)
        heapq.heappush(heap, (-err, seg_id, a, b, val, err))
        total_val += val
        total_err += err
        n += 1
    while total_err > max(abs_tol, rel_tol * abs(total_val)):
        if n >= max_panels:
            raise QuadratureFailure(
                f"{n} panels without meeting tolerance; "
                f"estimate {total_val!r} +- {total_err:.3e}"
            )
        _, seg_id, plo, phi, pval, perr = heapq.heappop(heap)
        g = segments[seg_id][0]
        pm = 0.5 * (plo + phi)
        if pm <= plo or pm >= phi:  # panel at float resolution: accept as is
            total_err -= perr
            total_err += 1e-18 * abs(pval)
            heapq.heappush(heap, (-0.0, seg_id, plo, phi, pval, 0.0))
            continue
        lval, lerr = _kronrod_panel(g, plo, pm)
        rval, rerr = _kronrod_panel(g, pm, phi)
        total_val += lval + rval - pval
        total_err += lerr + rerr - perr
        heapq.heappush(heap, (-lerr, seg_id, plo, pm, lval, lerr))
        heapq.heappush(heap, (-rerr, seg_id, pm, phi, rval, rerr))
        n += 1
    return QuadResult(sign * total_val, total_err, n)


class _Leaf:
    """A cached cumulative-quadrature cell: either a K15 value or two halves."""

    __slots__ = ("lo", "hi", "value", "err", "children")

    def __init__(self, lo: float, hi: float):
        self.lo = lo
        self.hi = hi
        self.value: Optional[float] = None
        self.err = 0.0
        self.children: Optional[tuple["_Leaf", "_Leaf"]] = None


class CumulativeQuadrature:
    """Antiderivative F(u) = int_{u0}^{u} f with panel caching.

    The interval around ``u0`` is covered by fixed cells; each cell holds one
    K15 value (refined by static bisection where the G7/K15 estimate exceeds
    its share of the budget).  A query sums whole cells and finishes with a
    single K15 application on the partial cell, so F is smooth inside cells
    and exactly continuous across cell boundaries -- finite differences of F
    recover f without cache-boundary noise.  Thread-safe; values are
    deterministic, so racing writes are benign and guarded anyway.
    """

    def __init__(
        self,
        f: Callable[[float], float],
        u0: float,
        lo: float,
        hi: float,
        abs_tol: float = DEFAULT_TOL.quad_abs,
        cell_width: float = 0.05,
        max_depth: int = 42,
    ):
        if not (lo <= u0 <= hi):
            raise ValueError(f"u0={u0} outside [{lo}, {hi}]")
        self.f = f
        self.u0 = u0
        self.lo = lo
        self.hi = hi
        self.abs_tol = abs_tol
        self.max_depth = max_depth
        self._lock = threading.Lock()
        span = max(hi - u0, u0 - lo, cell_width)
        self._per_unit = abs_tol / span
        n_right = max(1, math.ceil((hi - u0) / cell_width)) if hi > u0 else 0
        n_left = max(1, math.ceil((u0 - lo) / cell_width)) if lo < u0 else 0
        self._right = [
            _Leaf(u0 + (hi - u0) * i / n_right, u0 + (hi - u0) * (i + 1) / n_right)
            for i in range(n_right)
        ]
        self._left = [
            _Leaf(u0 - (u0 - lo) * (i + 1) / n_left, u0 - (u0 - lo) * i / n_left)
            for i in range(n_left)
        ]

    def _ensure(self, leaf: _Leaf, depth: int = 0) -> float:
        if leaf.value is not None:
            return leaf.value
        val, err = _kronrod_panel(self.f, leaf.lo, leaf.hi)
        floor = max(self._per_unit * (leaf.hi - leaf.lo), 1e-3 * self.abs_tol)
        if err > floor and err > 1e-16 * abs(val):
            if depth >= self.max_depth:
                raise QuadratureFailure(
                    f"cell [{leaf.lo}, {leaf.hi}] not converging (err {err:.3e})"
                )
            mid = 0.5 * (leaf.lo + leaf.hi)
            left, right = _Leaf(leaf.lo, mid), _Leaf(mid, leaf.hi)
            val = self._ensure(left, depth + 1) + self._ensure(right, depth + 1)
            err = left.err + right.err
            leaf.children = (left, right)
        leaf.err = err
        leaf.value = val
        return val

    def _partial(self, leaf: _Leaf, u: float, side: int) -> float:
        # Integral over the part of `leaf` between its inner edge and u.
        if leaf.children is not None:
            left, right = leaf.children
            if side > 0:
                if u >= right.lo:
                    return self._ensure(left) + self._partial(right, u, side)
                return self._partial(left, u, side)
            if u <= left.hi:
                return self._ensure(right) + self._partial(left, u, side)
            return self._partial(right, u, side)
        if side > 0:
            if u >= leaf.hi:
                return self._ensure(leaf)
            val, _ = _kronrod_panel(self.f, leaf.lo, u)
        else:
            if u <= leaf.lo:
                return self._ensure(leaf)
            val, _ = _kronrod_panel(self.f, u, leaf.hi)
        return val

    def __call__(self, u: float) -> float:
        u = float(u)
        if u == self.u0:
            return 0.0
        eps = 1e-12 * max(1.0, abs(self.hi), abs(self.lo))
        if not (self.lo - eps <= u <= self.hi + eps):
            raise ValueError(f"u={u} outside cumulative domain [{self.lo}, {self.hi}]")
        u = min(max(u, self.lo), self.hi)
        with self._lock:
            total = 0.0
            if u > self.u0:
                for leaf in self._right:
                    if u >= leaf.hi:
                        total += self._ensure(leaf)
                    elif u > leaf.lo:
                        total += self._partial(leaf, u, +1)
                        break
                    else:
                        break
                return total
            for leaf in self._left:
                if u <= leaf.lo:
                    total += self._ensure(leaf)
                elif u < leaf.hi:
                    total += self._partial(leaf, u, -1)
                    break
                else:
                    break
            return -total


def diff_central(
    f: Callable[[float], float],
    u: float,
    order: int = 1,
    h: float = DEFAULT_TOL.fd_first,
) -> float:
    """Central difference of order 1 or 2 with one Richardson level, O(h^4).

    Domain errors raised by ``f`` propagate (callers that want stencil
    shrinking wrap this; see oracle helpers).
    """
    if order == 1:
        d_h = (f(u + h) - f(u - h)) / (2.0 * h)
        d_h2 = (f(u + 0.5 * h) - f(u - 0.5 * h)) / h
        return (4.0 * d_h2 - d_h) / 3.0
    if order == 2:
        fc = f(u)
        d_h = (f(u + h) - 2.0 * fc + f(u - h)) / (h * h)
        d_h2 = (f(u + 0.5 * h) - 2.0 * fc + f(u - 0.5 * h)) / (0.25 * h * h)
        return (4.0 * d_h2 - d_h) / 3.0
    raise ValueError(f"order must be 1 or 2, got {order}")


def bracket_root(
    f: Callable[[float], float] | Callable[[float], bool],
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL.bisect,
) -> float:
    """Bisect [lo, hi] down to ``tol`` for the sign change / predicate flip.

    ``f`` may return a real (root of a sign change is located) or a bool
    (the flip abscissa is located).  Raises NoBracket when both ends agree.
    """

    def state(x: float) -> bool:
        v = f(x)
        if isinstance(v, bool):
            return v
        return v > 0.0

    s_lo, s_hi = state(lo), state(hi)
    if s_lo == s_hi:
        raise NoBracket(f"no sign change or flip on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if state(mid) == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class SmoothFunction:
    """A scalar function of one variable with first and second derivatives.

    Analytic derivatives are used when supplied; otherwise central finite
    differences with the documented default steps fill in.  All closed-form
    solution families supply analytic derivatives.
    """

    def __init__(
        self,
        f: Callable[[float], float],
        df: Optional[Callable[[float], float]] = None,
        d2f: Optional[Callable[[float], float]] = None,
        fd_step: float = DEFAULT_TOL.fd_first,
    ):
        self.f = f
        self._df = df
        self._d2f = d2f
        self.fd_step = fd_step

    def __call__(self, u: float) -> float:
        return self.f(u)

    def deriv(self, u: float) -> float:
        if self._df is not None:
            return self._df(u)
        return diff_central(self.f, u, order=1, h=self.fd_step)

    def second(self, u: float) -> float:
        if self._d2f is not None:
            return self._d2f(u)
        if self._df is not None:
            return diff_central(self._df, u, order=1, h=DEFAULT_TOL.fd_second)
        return diff_central(self.f, u, order=2, h=DEFAULT_TOL.fd_second)

    @classmethod
    def wrap(cls, f) -> "SmoothFunction":
        return f if isinstance(f, SmoothFunction) else cls(f)


def shrinking_diff(
    f: Callable[[float], float],
    u: float,
    order: int = 1,
    h: float = DEFAULT_TOL.fd_first,
    h_min: float = DEFAULT_TOL.fd_min,
) -> float:
    """diff_central that halves the step when the stencil leaves the domain.

    Errors out with StencilOutOfDomain once the step would drop below h_min.
    """
    from .errors import BcvHelixError

    while True:
        try:
            return diff_central(f, u, order=order, h=h)
        except BcvHelixError:
            h *= 0.5
            if h < h_min:
                raise StencilOutOfDomain(
                    f"stencil at u={u} cannot fit the domain above h_min={h_min}"
                )
