"""Independent solution pairs of psi'' + (E - V(z)) psi = 0 in each region.

Every pair is normalised at the centre of its own region (local coordinate
0) to f1 = 1, f1' = 0, f2 = 0, f2' = 1, so f1 is even, f2 is odd and the
Wronskian f1 f2' - f1' f2 equals one. Local coordinates are z1 = z - pi in
the well and z2 = z - 2 pi in the barrier.

Two modes are offered for the biparabolic lattice:

* ``Mode.EXACT``: parabolic-cylinder solutions written through Kummer's
  function, exact for the quadratic branches of the potential.
* ``Mode.NEAR_TOP``: the energy-independent Bessel pair that the barrier
  solutions reduce to at E = V, and free trigonometric solutions in the
  well (leading term of the Tricomi expansion, good for deep wells).

Kronig-Penney segments are flat, so their pairs are elementary.
All functions accept a scalar or an array of local coordinates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RealityError
from .potential import PotentialKind, PotentialSpec
from .specfun import bessel_j_array, gamma_fn, kummer_m_array

__all__ = [
    "Mode",
    "SolutionPair",
    "alpha_of",
    "beta_of",
    "well_pair_exact",
    "barrier_pair_exact",
    "barrier_pair_neartop",
    "well_pair_neartop",
    "flat_pair",
    "well_pair",
    "barrier_pair",
    "neartop_validity",
    "NEARTOP_THRESHOLD",
]

NEARTOP_THRESHOLD = 0.15
IMAG_TOL = 1e-10
IMAG_FATAL = 1e-8
_Z_SMALL = 1e-6
_E_SMALL = 1e-12

_G34 = gamma_fn(0.75)
_G54 = gamma_fn(1.25)


class Mode(str, enum.Enum):
    EXACT = "exact"
    NEAR_TOP = "neartop"


@dataclass(frozen=True)
class SolutionPair:
    """Values and z-derivatives of the two solutions at one or more points."""

    f1: np.ndarray | float
    df1: np.ndarray | float
    f2: np.ndarray | float
    df2: np.ndarray | float
    imag_residue: float = 0.0

    @property
    def wronskian(self):
        return self.f1 * self.df2 - self.df1 * self.f2

    def as_tuple(self):
        return self.f1, self.df1, self.f2, self.df2


def _pack(f1, df1, f2, df2, scalar: bool, imag: float = 0.0) -> SolutionPair:
    if scalar:
        return SolutionPair(float(f1.ravel()[0]), float(df1.ravel()[0]), float(f2.ravel()[0]), float(df2.ravel()[0]), imag)
    return SolutionPair(f1, df1, f2, df2, imag)


def _grid(E, z):
    """Broadcast energy and coordinate; report whether both were scalars."""
    scalar = np.ndim(E) == 0 and np.ndim(z) == 0
    Eb, zb = np.broadcast_arrays(np.asarray(E, dtype=float), np.asarray(z, dtype=float))
    return np.atleast_1d(Eb), np.atleast_1d(zb), scalar


def alpha_of(E, chi: float):
    """Well-region Kummer parameter (1 - E/sqrt(chi)) / 4."""
    if not chi > 0:
        raise DomainError(f"chi must be positive, got {chi}")
    return 0.25 * (1.0 - E / math.sqrt(chi))


def beta_of(E, V: float, chi: float):
    """Barrier-region Kummer parameter (1 - i (E - V)/sqrt(chi)) / 4."""
    if not chi > 0:
        raise DomainError(f"chi must be positive, got {chi}")
    out = 0.25 - 0.25j * (np.asarray(E, dtype=float) - V) / math.sqrt(chi)
    return complex(out) if np.ndim(out) == 0 else out


def well_pair_exact(E, chi: float, z1) -> SolutionPair:
    """exp(-s z^2/2) M(alpha, 1/2; s z^2) and z exp(-s z^2/2) M(alpha + 1/2, 3/2; s z^2), s = sqrt(chi)."""
    if not chi > 0:
        raise DomainError(f"chi must be positive, got {chi}")
    E, z, scalar = _grid(E, z1)
    a = alpha_of(E, chi)
    s = math.sqrt(chi)
    x = s * z * z
    m1, dm1, _, _ = kummer_m_array(a, 0.5, x)
    m2, dm2, _, _ = kummer_m_array(a + 0.5, 1.5, x)
    m1, dm1, m2, dm2 = m1.real, dm1.real, m2.real, dm2.real
    g = np.exp(-0.5 * x)
    f1 = g * m1
    df1 = g * s * z * (2.0 * dm1 - m1)
    f2 = z * g * m2
    df2 = g * (m2 + x * (2.0 * dm2 - m2))
    return _pack(f1, df1, f2, df2, scalar)


def barrier_pair_exact(E, V: float, chi: float, z2) -> SolutionPair:
    """exp(i s z^2/2) M(beta, 1/2; -i s z^2) and its odd partner, projected to real.

    beta and 1/2 - beta are complex conjugates, which makes both functions
    real; the imaginary residue is checked and reported.
    """
    if not chi > 0:
        raise DomainError(f"chi must be positive, got {chi}")
    E, z, scalar = _grid(E, z2)
    b = beta_of(E, V, chi)
    s = math.sqrt(chi)
    zz = z * z
    x = -1j * s * zz
    m1, dm1, _, _ = kummer_m_array(b, 0.5, x)
    m2, dm2, _, _ = kummer_m_array(b + 0.5, 1.5, x)
    g = np.exp(0.5j * s * zz)
    f1 = g * m1
    df1 = g * 1j * s * z * (m1 - 2.0 * dm1)
    f2 = z * g * m2
    df2 = g * (m2 + 1j * s * zz * (m2 - 2.0 * dm2))
    parts = (f1, df1, f2, df2)
    imag = max(float(np.max(np.abs(p.imag) / np.maximum(1.0, np.abs(p.real)))) for p in parts)
    if imag > IMAG_FATAL:
        raise RealityError(f"barrier solutions not real: residue {imag:.3e}")
    return _pack(f1.real, df1.real, f2.real, df2.real, scalar, imag)


def barrier_pair_neartop(chi: float, z2) -> SolutionPair:
    """Barrier pair at E = V expressed through J_{+-1/4}; energy independent."""
    if not chi > 0:
        raise DomainError(f"chi must be positive, got {chi}")
    s = math.sqrt(chi)
    scalar = np.ndim(z2) == 0
    z = np.atleast_1d(np.asarray(z2, dtype=float))
    az = np.abs(z)
    small = az < _Z_SMALL
    # dummy argument keeps J_{-nu}(0) out of the evaluation; limits are patched in below
    zs = np.where(small, 1.0, az)
    w = 0.5 * s * zs * zs
    q = (0.5 * w) ** 0.25
    f1 = _G34 * q * bessel_j_array(-0.25, w)
    df1 = -_G34 * q * bessel_j_array(0.75, w) * s * zs * np.sign(z)
    c2 = _G54 * (8.0 / chi) ** 0.25 * w**0.25
    f2 = c2 * bessel_j_array(0.25, w) * np.sign(z)
    df2 = c2 * bessel_j_array(-0.75, w) * s * zs
    f1 = np.where(small, 1.0, f1)
    df1 = np.where(small, 0.0, df1)
    f2 = np.where(small, z, f2)
    df2 = np.where(small, 1.0, df2)
    return _pack(f1, df1, f2, df2, scalar)


def flat_pair(q, z) -> SolutionPair:
    """Pair for psi'' + q psi = 0: cos/sin for q > 0, cosh/sinh for q < 0."""
    q, z, scalar = _grid(q, z)
    k = np.sqrt(q.astype(complex))
    small = np.abs(q) < _E_SMALL
    ks = np.where(small, 1.0, k)
    c = np.cos(ks * z).real
    sn = np.sin(ks * z)
    f1 = np.where(small, 1.0 - 0.5 * q * z * z, c)
    df1 = np.where(small, -q * z, (-ks * sn).real)
    f2 = np.where(small, z - q * z**3 / 6.0, (sn / ks).real)
    df2 = f1
    return _pack(f1, df1, f2, df2, scalar)


def well_pair_neartop(E, z1) -> SolutionPair:
    """cos(sqrt(E) z) and sin(sqrt(E) z)/sqrt(E); the well potential is dropped."""
    if np.any(np.asarray(E) < 0):
        raise DomainError(f"near-top well pair needs E >= 0, got {E}")
    return flat_pair(E, z1)


def well_pair(spec: PotentialSpec, mode: Mode, E: float, z1) -> SolutionPair:
    if spec.kind is PotentialKind.KRONIG_PENNEY:
        return flat_pair(E, z1)
    if mode is Mode.NEAR_TOP or spec.chi == 0:
        return well_pair_neartop(E, z1)
    return well_pair_exact(E, spec.chi, z1)


def barrier_pair(spec: PotentialSpec, mode: Mode, E: float, z2) -> SolutionPair:
    if spec.kind is PotentialKind.KRONIG_PENNEY:
        return flat_pair(E - spec.V, z2)
    if spec.chi == 0:
        return flat_pair(E, z2)
    if mode is Mode.NEAR_TOP:
        return barrier_pair_neartop(spec.chi, z2)
    return barrier_pair_exact(E, spec.V, spec.chi, z2)


def neartop_validity(spec: PotentialSpec, E: float, threshold: float = NEARTOP_THRESHOLD) -> dict:
    """Diagnostics for how far E sits from the regime the near-top pairs assume."""
    s = math.sqrt(spec.chi) if spec.chi > 0 else 0.0
    detuning = abs(E - spec.V) / s if s > 0 else math.inf
    return {
        "detuning": detuning,
        "barrier_ok": detuning < threshold,
        "well_ok": spec.chi >= 1.0,
    }
