"""Numerical ground truth: direct integration of psi'' = (V(z) - E) psi.

Nothing in here uses the analytic solution pairs. Biparabolic pieces are
integrated with an embedded 8(5,3) Runge-Kutta pair, split at every kink of
the potential; flat Kronig-Penney segments are propagated with their
closed-form transfer matrices, split at the jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, StepFailure
from .potential import PotentialKind, PotentialSpec, eval_potential

__all__ = [
    "Monodromy",
    "integrate",
    "integrate_callable",
    "monodromy_of",
    "kp_trace_analytic",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Monodromy:
    m11: float
    m12: float
    m21: float
    m22: float
    energy: float

    @property
    def determinant(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def scaled_det_residual(self) -> float:
        """|det - 1| relative to the size of the products that cancel in it.

        Deep barriers make the entries large; the subtraction then loses
        roughly log10(|m11 m22|) digits no matter how accurate the entries are.
        """
        scale = max(1.0, abs(self.m11 * self.m22) + abs(self.m12 * self.m21))
        return abs(self.determinant - 1.0) / scale

    @property
    def half_trace(self) -> float:
        return 0.5 * (self.m11 + self.m22)

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])


def _breakpoints(spec: PotentialSpec, lo: float, hi: float) -> list[float]:
    if spec.kind is PotentialKind.BIPARABOLIC:
        pts = [(k + 0.5) * math.pi for k in range(math.floor(lo / math.pi - 0.5), math.ceil(hi / math.pi))]
    else:
        hb = spec.barrier_half_width
        pts = []
        for m in range(math.floor(lo / _TWO_PI) - 1, math.ceil(hi / _TWO_PI) + 2):
            pts += [m * _TWO_PI - hb, m * _TWO_PI + hb]
    return sorted(p for p in pts if lo < p < hi)


def _rk_segment(rhs_coeff: Callable[[float], float], z0: float, z1: float, Y: np.ndarray, tol: float) -> np.ndarray:
    """Propagate columns of Y = [[psi...], [psi'...]] from z0 to z1."""
    n = Y.shape[1]

    def f(z, y):
        c = rhs_coeff(z)
        out = np.empty_like(y)
        out[:n] = y[n:]
        out[n:] = c * y[:n]
        return out

    sol = solve_ivp(f, (z0, z1), Y.reshape(-1), method="DOP853", rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise StepFailure(sol.message)
    return sol.y[:, -1].reshape(2, n)


def _flat_transfer(q: float, h: float) -> np.ndarray:
    """Transfer matrix of psi'' + q psi = 0 over a length h."""
    if q > 0:
        k = math.sqrt(q)
        c, s = math.cos(k * h), math.sin(k * h)
        return np.array([[c, s / k], [-k * s, c]])
    if q < 0:
        k = math.sqrt(-q)
        c, s = math.cosh(k * h), math.sinh(k * h)
        return np.array([[c, s / k], [k * s, c]])
    return np.array([[1.0, h], [0.0, 1.0]])


def _propagate(spec: PotentialSpec, E: float, z_from: float, Y: np.ndarray, z_to: float, tol: float) -> np.ndarray:
    if z_to == z_from:
        return Y.copy()
    sign = 1.0 if z_to > z_from else -1.0
    lo, hi = min(z_from, z_to), max(z_from, z_to)
    knots = [z_from] + _breakpoints(spec, lo, hi)[:: int(sign)] + [z_to]
    for a, b in zip(knots[:-1], knots[1:]):
        mid = 0.5 * (a + b)
        if spec.kind is PotentialKind.KRONIG_PENNEY:
            Y = _flat_transfer(E - eval_potential(spec, mid), b - a) @ Y
            continue
        m = math.floor(mid / math.pi + 0.5)
        centre = m * math.pi
        V, chi = spec.V, spec.chi
        if m % 2 == 0:
            coeff = lambda z, c=centre: V - chi * (z - c) ** 2 - E  # noqa: E731
        else:
            coeff = lambda z, c=centre: chi * (z - c) ** 2 - E  # noqa: E731
        Y = _rk_segment(coeff, a, b, Y, tol)
    return Y


def integrate(spec: PotentialSpec, E: float, z_from: float, y: Sequence[float], z_to: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Propagate (psi, psi') from z_from to z_to."""
    if not 1e-13 <= tol <= 1e-6:
        raise DomainError(f"tol must lie in [1e-13, 1e-6], got {tol}")
    Y = np.array([[float(y[0])], [float(y[1])]])
    out = _propagate(spec, E, z_from, Y, z_to, tol)
    return float(out[0, 0]), float(out[1, 0])


def integrate_callable(potential: Callable[[float], float], E: float, z_from: float, y: Sequence[float], z_to: float, tol: float = DEFAULT_TOL, breakpoints: Sequence[float] = ()) -> tuple[float, float]:
    """Same as :func:`integrate` for an arbitrary smooth-between-breakpoints V(z)."""
    lo, hi = min(z_from, z_to), max(z_from, z_to)
    inner = sorted(p for p in breakpoints if lo < p < hi)
    if z_to < z_from:
        inner = inner[::-1]
    knots = [z_from] + inner + [z_to]
    Y = np.array([[float(y[0])], [float(y[1])]])
    for a, b in zip(knots[:-1], knots[1:]):
        Y = _rk_segment(lambda z: potential(z) - E, a, b, Y, tol)
    return float(Y[0, 0]), float(Y[1, 0])


def monodromy_of(spec: PotentialSpec, E: float, tol: float = DEFAULT_TOL) -> Monodromy:
    """Period map of (psi, psi') from the cell start across one full period."""
    if not E > 0:
        raise DomainError(f"monodromy needs E > 0, got {E}")
    z0 = spec.cell_start
    M = _propagate(spec, E, z0, np.eye(2), z0 + _TWO_PI, tol)
    return Monodromy(float(M[0, 0]), float(M[0, 1]), float(M[1, 0]), float(M[1, 1]), float(E))


def kp_trace_analytic(E: float, V: float, barrier_fraction: float = 0.5) -> float:
    """Closed-form half-trace of the Kronig-Penney period map."""
    if not E > 0:
        raise DomainError(f"E must be positive, got {E}")
    a = _TWO_PI * (1.0 - barrier_fraction)  # well width
    b = _TWO_PI * barrier_fraction  # barrier width
    k = math.sqrt(E)
    q = E - V
    if abs(q) < 1e-12:
        return math.cos(k * a) - 0.5 * k * b * math.sin(k * a)
    if q > 0:
        K = math.sqrt(q)
        return math.cos(k * a) * math.cos(K * b) - (k * k + K * K) / (2 * k * K) * math.sin(k * a) * math.sin(K * b)
    K = math.sqrt(-q)
    return math.cos(k * a) * math.cosh(K * b) + (K * K - k * k) / (2 * k * K) * math.sin(k * a) * math.sinh(K * b)
