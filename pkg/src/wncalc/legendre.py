"""Legendre transform of growth functions and the dual Legendre function.

``legendre_transform(u, t)`` computes ``inf_{r>0} u(r)/r^t`` in log space;
``dual_function(u, r)`` computes ``sup_{s>0} exp(2 sqrt(rs))/u(s)``.  Both
work on ``y = log r`` with a coarse scan, bracketing and golden-section
refinement, since (log, x^2)-convexity of u does not guarantee convexity
of the objective in y.

``dual_weight`` materializes u* as a WeightFunction backed by a memoized
geometric grid with monotone (PCHIP) interpolation, so that transforms of
transforms (the dual-sequence relation) stay tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import optimize
from .weights import (
    CONSISTENT,
    VIOLATED,
    DomainError,
    PrecisionError,
    WeightFunction,
    from_callable,
)

_Y_LO = math.log(1e-24)


class UnboundedError(ArithmeticError):
    """The inf/sup defining the transform is unbounded on the search range."""


@dataclass(frozen=True)
class TransformResult:
    log_value: float
    arg_r: float
    status: str


def _safe_log_eval(u: WeightFunction, r: float) -> float:
    # treat overflow of log u as +inf: harmless for the infimum, and it
    # steers the dual's maximization away from the overflow region
    try:
        return u.log_eval(r)
    except (OverflowError, PrecisionError):
        return math.inf


def legendre_transform(u: WeightFunction, t: float) -> TransformResult:
    """log of inf_{r>0} u(r)/r^t, with the minimizer r*."""
    if t < 0:
        raise ValueError("t must be >= 0")
    y_hi = math.log(u.r_max)

    def g(y: float) -> float:
        return _safe_log_eval(u, math.exp(y)) - t * y

    res = optimize.minimize_scalar(g, _Y_LO, y_hi)
    if res.status == optimize.STATUS_UPPER_BOUNDARY and t > 0:
        raise UnboundedError(
            f"inf of {u.name}(r)/r^{t} still decreasing at r_max={u.r_max}"
        )
    return TransformResult(log_value=res.value, arg_r=math.exp(res.x), status=res.status)


def dual_function(u: WeightFunction, r: float) -> TransformResult:
    """log of sup_{s>0} exp(2 sqrt(rs))/u(s), with the maximizer s*."""
    if r < 0:
        raise ValueError("r must be >= 0")
    y_hi = math.log(u.r_max)
    sqrt_r = math.sqrt(r)

    def h(y: float) -> float:
        return -(2.0 * sqrt_r * math.exp(0.5 * y) - _safe_log_eval(u, math.exp(y)))

    res = optimize.minimize_scalar(h, _Y_LO, y_hi)
    if res.status == optimize.STATUS_UPPER_BOUNDARY and r > 0:
        raise UnboundedError(
            f"sup of exp(2 sqrt({r} s))/{u.name}(s) still increasing at r_max={u.r_max};"
            " u may fail the C_+,1/2 growth condition"
        )
    return TransformResult(log_value=-res.value, arg_r=math.exp(res.x), status=res.status)


# ---------------------------------------------------------------------------
# materialized dual weight


class _DualCache:
    """Geometric-grid cache of log u*(r) with PCHIP interpolation in log r."""

    def __init__(self, u: WeightFunction, r_lo: float, r_hi: float, per_decade: int):
        self.u = u
        n = max(2, int(round(per_decade * math.log10(r_hi / r_lo))) + 1)
        self.log_r = np.linspace(math.log(r_lo), math.log(r_hi), n)
        self._values = None

    def _build(self):
        vals = np.array(
            [dual_function(self.u, math.exp(x)).log_value for x in self.log_r]
        )
        # u* is nondecreasing; clip tiny optimizer jitter so PCHIP stays monotone
        vals = np.maximum.accumulate(vals)
        self._values = PchipInterpolator(self.log_r, vals, extrapolate=False)

    def __call__(self, r: float) -> float:
        if self._values is None:
            self._build()
        x = math.log(r)
        if x < self.log_r[0]:
            # below the cache: u* continuous with u*(0) = 1, interpolate to 0
            return float(self._values(self.log_r[0])) * (r / math.exp(self.log_r[0]))
        return float(self._values(x))


def dual_weight(
    u: WeightFunction,
    r_max: float = 1e8,
    per_decade: int = 256,
    r_lo: float = 1e-8,
) -> WeightFunction:
    cache = _DualCache(u, r_lo, r_max, per_decade)
    return from_callable(
        name=f"dual({u.name})",
        log_eval=cache,
        r_max=r_max,
        params={"dual_of": u.name, **{f"base_{k}": v for k, v in u.params.items()}},
    )


# ---------------------------------------------------------------------------
# tables and audits


@dataclass(frozen=True)
class LegendreTable:
    t_grid: list[float]
    log_ell: list[float]
    argmin_r: list[float]
    optimizer_status: list[str]

    def to_csv(self) -> str:
        lines = ["t,ell,argmin_r,status"]
        for t, v, r, s in zip(self.t_grid, self.log_ell, self.argmin_r, self.optimizer_status):
            lines.append(f"{t!r},{math.exp(v) if v < 700 else math.inf!r},{r!r},{s}")
        return "\n".join(lines) + "\n"


def legendre_table(u: WeightFunction, t_grid: Sequence[float]) -> LegendreTable:
    rows = [legendre_transform(u, t) for t in t_grid]
    return LegendreTable(
        t_grid=[float(t) for t in t_grid],
        log_ell=[r.log_value for r in rows],
        argmin_r=[r.arg_r for r in rows],
        optimizer_status=[r.status for r in rows],
    )


def audit_infimum(u: WeightFunction, t: float, log_ell: float, rng, n_points: int = 128,
                  tol: float = 1e-9) -> bool:
    """Certificate check: log u(r) - t log r >= log_ell - tol on random r."""
    lo, hi = math.log(1e-6), math.log(u.r_max)
    ys = rng.uniform(lo, hi, n_points)
    return all(
        _safe_log_eval(u, math.exp(y)) - t * y >= log_ell - tol for y in ys
    )


def audit_supremum(u: WeightFunction, r: float, log_ustar: float, rng,
                   n_points: int = 128, tol: float = 1e-9) -> bool:
    lo, hi = math.log(1e-6), math.log(u.r_max)
    ys = rng.uniform(lo, hi, n_points)
    return all(
        2.0 * math.sqrt(r * math.exp(y)) - _safe_log_eval(u, math.exp(y))
        <= log_ustar + tol
        for y in ys
    )


# ---------------------------------------------------------------------------
# sequence equivalence


def log_factorial(n: int) -> float:
    """Exact big-integer factorial below 64, log-gamma above."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n < 64:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1.0)


@dataclass(frozen=True)
class EquivalenceReport:
    verdict: str
    K1: float
    K2: float
    c1: float
    c2: float
    max_residual: float
    n_range: tuple[int, int]
    rho: list[float] = field(default_factory=list, compare=False)


DRIFT_TOL = 0.5


def seq_equivalent(
    log_a: Sequence[float],
    log_b: Sequence[float],
    drift_tol: float = DRIFT_TOL,
) -> EquivalenceReport:
    """Fit K1 c1^n a(n) <= b(n) <= K2 c2^n a(n) on the given range.

    The geometric rate c is the least-squares slope of the residual on the
    tail third (the finite-range estimate of the asymptotic rate); K1/K2
    are the residual extremes, so the reported constants satisfy the
    inequalities literally on the range.  The verdict is `violated` when
    the local slope drifts between the head and the tail by more than
    drift_tol, the finite-range signature of a super-geometric ratio.
    """
    la = np.asarray(log_a, dtype=float)
    lb = np.asarray(log_b, dtype=float)
    if la.shape != lb.shape or la.ndim != 1 or len(la) < 6:
        raise ValueError("need two equal-length sequences of at least 6 values")
    if not (np.all(np.isfinite(la)) and np.all(np.isfinite(lb))):
        raise ValueError("sequence values must be positive and finite")
    n = np.arange(len(la), dtype=float)
    rho = lb - la

    k = max(3, len(rho) // 3)
    slope_tail = np.polyfit(n[-k:], rho[-k:], 1)[0]
    slope_head = np.polyfit(n[:k], rho[:k], 1)[0]
    drift = abs(slope_tail - slope_head)

    resid = rho - slope_tail * n
    log_K2 = float(np.max(resid))
    log_K1 = float(np.min(resid))
    return EquivalenceReport(
        verdict=CONSISTENT if drift <= drift_tol else VIOLATED,
        K1=math.exp(log_K1),
        K2=math.exp(log_K2),
        c1=math.exp(slope_tail),
        c2=math.exp(slope_tail),
        max_residual=float(np.max(np.abs(resid))),
        n_range=(0, len(rho) - 1),
        rho=rho.tolist(),
    )


def verify_dual_sequence(
    u: WeightFunction,
    n_max: int,
    ustar: WeightFunction | None = None,
    drift_tol: float = DRIFT_TOL,
) -> EquivalenceReport:
    """Check ell_{u*}(n) ell_u(n) (n!)^2 ~ 1 on n <= n_max.

    u* is constructed numerically unless supplied.
    """
    if n_max < 10:
        raise ValueError("n_max must be >= 10")
    if ustar is None:
        ustar = dual_weight(u)
    rho = []
    for n in range(n_max + 1):
        l_u = legendre_transform(u, n).log_value
        l_us = legendre_transform(ustar, n).log_value
        rho.append(l_u + l_us + 2.0 * log_factorial(n))
    return seq_equivalent([0.0] * len(rho), rho, drift_tol=drift_tol)
