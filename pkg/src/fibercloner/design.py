"""Design equations of the asymmetric phase-covariant cloner.

Maps the asymmetry parameter q to the two coupler reflectances (R0, R1) that
realize the conditional cloning map, and evaluates the theoretical clone
fidelities together with the universal-cloner trade-off used as a baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_RESIDUAL_TOL = 1e-12
_SCAN_POINTS = 1000
_EPS = 1e-9

PHASE_COVARIANT = "phase_covariant"
UNIVERSAL = "universal"


@dataclass(frozen=True)
class CloneDesign:
    """Solved cloner design: asymmetry, coupler reflectances and the
    theoretical fidelities of both clones."""

    q: float
    R0: float
    R1: float
    F_A_theory: float
    F_B_theory: float


@dataclass(frozen=True)
class TradeoffPoint:
    """One point of a fidelity trade-off curve."""

    F_A: float
    F_B: float
    parameter: float
    family: str


def _check_unit_interval(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {x}")


def cubic_residual(q: float, R0: float) -> float:
    """Residual of the reflectance design polynomial.

    R0(1-R0) + [R0(2q-1) - q](2R0-1)^2 vanishes at the R0 values for which a
    matching R1 exists; the admissible designs are its roots in (0, 1).
    """
    return R0 * (1.0 - R0) + (R0 * (2.0 * q - 1.0) - q) * (2.0 * R0 - 1.0) ** 2


def reflectance_ratio(q: float, R0: float) -> float:
    """R1 as a function of (q, R0): q(1-R0) / [q(1-R0) + (1-q)R0]."""
    num = q * (1.0 - R0)
    den = num + (1.0 - q) * R0
    if den == 0.0:
        raise ZeroDivisionError("R1 is indeterminate (0/0) at this (q, R0)")
    return num / den


def _bisect_root(q: float, a: float, b: float) -> float:
    fa = cubic_residual(q, a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = cubic_residual(q, m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
        if b - a < 1e-16:
            break
    root = 0.5 * (a + b)
    # One Newton polish step; derivative by central difference is plenty here.
    h = 1e-7
    d = (cubic_residual(q, root + h) - cubic_residual(q, root - h)) / (2.0 * h)
    if d != 0.0:
        polished = root - cubic_residual(q, root) / d
        if a <= polished <= b and abs(cubic_residual(q, polished)) <= abs(
            cubic_residual(q, root)
        ):
            root = polished
    return root


def _real_roots(q: float) -> list[float]:
    """All sign-change roots of the design polynomial on (0, 1), found by a
    1000-interval scan followed by bisection."""
    roots = []
    xs = [(_EPS + k * (1.0 - 2.0 * _EPS) / _SCAN_POINTS) for k in range(_SCAN_POINTS + 1)]
    fs = [cubic_residual(q, x) for x in xs]
    for k in range(_SCAN_POINTS):
        if fs[k] == 0.0:
            roots.append(xs[k])
        elif fs[k] * fs[k + 1] < 0.0:
            roots.append(_bisect_root(q, xs[k], xs[k + 1]))
    if fs[-1] == 0.0:
        roots.append(xs[-1])
    return roots


def theoretical_fidelities(q: float) -> tuple[float, float]:
    """Ideal clone fidelities ((1+sqrt(q))/2, (1+sqrt(1-q))/2)."""
    _check_unit_interval("q", q)
    return 0.5 * (1.0 + math.sqrt(q)), 0.5 * (1.0 + math.sqrt(1.0 - q))


def solve_reflectances(q: float) -> CloneDesign:
    """Solve the coupler reflectances implementing asymmetry q.

    Among the real roots of the design polynomial that yield an R1 in [0, 1],
    the one with R0 > 1/2 is returned; this "less unbalanced" choice is the
    one that reproduces the published design table for every q.  The
    degenerate endpoint q = 1 is (R0, R1) = (1, 1) by continuity.
    """
    _check_unit_interval("q", q)
    f_a, f_b = theoretical_fidelities(q)
    if q == 1.0:
        # The polynomial has a double root at R0 = 1 (no sign change) and the
        # R1 relation is 0/0 there; the continuous limit is R1 = 1.
        return CloneDesign(q=q, R0=1.0, R1=1.0, F_A_theory=f_a, F_B_theory=f_b)

    candidates = []
    for r0 in _real_roots(q):
        try:
            r1 = reflectance_ratio(q, r0)
        except ZeroDivisionError:
            continue
        if 0.0 <= r1 <= 1.0 and r0 > 0.5:
            candidates.append((r0, r1))
    if not candidates:
        raise RuntimeError(f"no admissible reflectance root found for q={q}")
    if len(candidates) > 1:
        raise RuntimeError(f"ambiguous reflectance roots for q={q}: {candidates}")
    r0, r1 = candidates[0]
    if abs(cubic_residual(q, r0)) >= 1e-10:
        raise RuntimeError(f"root residual too large for q={q}")
    return CloneDesign(q=q, R0=r0, R1=r1, F_A_theory=f_a, F_B_theory=f_b)


def universal_tradeoff(p: float) -> TradeoffPoint:
    """Fidelity pair of the optimal universal asymmetric cloner at parameter p."""
    _check_unit_interval("p", p)
    d = 1.0 - p + p * p
    f_a = 1.0 - (1.0 - p) ** 2 / (2.0 * d)
    f_b = 1.0 - p * p / (2.0 * d)
    return TradeoffPoint(F_A=f_a, F_B=f_b, parameter=p, family=UNIVERSAL)


def pc_tradeoff_curve(n_points: int) -> list[TradeoffPoint]:
    """Sample the phase-covariant trade-off curve uniformly in q over [0, 1]."""
    if n_points < 2:
        raise ValueError("need at least 2 points")
    points = []
    for k in range(n_points):
        q = k / (n_points - 1)
        f_a, f_b = theoretical_fidelities(q)
        points.append(TradeoffPoint(F_A=f_a, F_B=f_b, parameter=q, family=PHASE_COVARIANT))
    return points


def universal_fb_at(f_a: float) -> float:
    """F_B of the universal trade-off at a given F_A, by inverting the curve
    (F_A is strictly increasing in p)."""
    if not 0.5 <= f_a <= 1.0:
        raise ValueError(f"F_A must be in [1/2, 1], got {f_a}")
    lo, hi = 0.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if universal_tradeoff(mid).F_A < f_a:
            lo = mid
        else:
            hi = mid
    return universal_tradeoff(0.5 * (lo + hi)).F_B
