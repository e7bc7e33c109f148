"""Periodic potentials on the scaled lattice (period 2*pi).

The biparabolic lattice alternates a downward parabola (barrier, centred on
even multiples of pi) and an upward one (well, centred on odd multiples)::

    V(z) = V - chi (z - m pi)^2      m even
    V(z) =     chi (z - m pi)^2      m odd,      chi = 2 V / pi^2

for (m - 1/2) pi <= z < (m + 1/2) pi. The Kronig-Penney comparison lattice
puts a flat barrier of height V and width 2*pi*barrier_fraction at the same
centres and V = 0 elsewhere.

The canonical cell starts at the left edge of the well centred on pi and
ends one period later; for the biparabolic lattice it is [pi/2, 5pi/2) with
the well on [pi/2, 3pi/2) and the barrier on [3pi/2, 5pi/2).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError

__all__ = [
    "PotentialKind",
    "PotentialSpec",
    "Region",
    "make_biparabolic",
    "make_kronig_penney",
    "eval_potential",
    "region_of",
]

TWO_PI = 2.0 * math.pi


class PotentialKind(str, enum.Enum):
    BIPARABOLIC = "biparabolic"
    KRONIG_PENNEY = "kronig_penney"


class Region(str, enum.Enum):
    WELL = "well"  # region I
    BARRIER = "barrier"  # region II


@dataclass(frozen=True)
class PotentialSpec:
    kind: PotentialKind
    V: float
    chi: float = 0.0
    barrier_fraction: float = 0.5

    @property
    def well_half_width(self) -> float:
        return math.pi * (1.0 - self.barrier_fraction)

    @property
    def barrier_half_width(self) -> float:
        return math.pi * self.barrier_fraction

    @property
    def cell_start(self) -> float:
        return math.pi - self.well_half_width

    @property
    def junction(self) -> float:
        """Well-to-barrier boundary inside the canonical cell."""
        return math.pi + self.well_half_width

    @property
    def cell_end(self) -> float:
        return self.cell_start + TWO_PI

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "V": self.V}
        if self.kind is PotentialKind.KRONIG_PENNEY:
            out["barrier_fraction"] = self.barrier_fraction
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PotentialSpec":
        kind = str(data.get("kind", "biparabolic")).lower()
        if kind in ("kp", "kronig_penney", "kronig-penney"):
            return make_kronig_penney(float(data["V"]), float(data.get("barrier_fraction", 0.5)))
        if kind == "biparabolic":
            return make_biparabolic(float(data["V"]))
        raise DomainError(f"unknown potential kind {data.get('kind')!r}")


def make_biparabolic(V: float) -> PotentialSpec:
    if not V >= 0:
        raise DomainError(f"potential height must be >= 0, got {V}")
    return PotentialSpec(PotentialKind.BIPARABOLIC, float(V), chi=2.0 * V / math.pi**2)


def make_kronig_penney(V: float, barrier_fraction: float = 0.5) -> PotentialSpec:
    if not V >= 0:
        raise DomainError(f"potential height must be >= 0, got {V}")
    if not 0.0 < barrier_fraction < 1.0:
        raise DomainError(f"barrier_fraction must lie in (0, 1), got {barrier_fraction}")
    return PotentialSpec(PotentialKind.KRONIG_PENNEY, float(V), barrier_fraction=float(barrier_fraction))


def eval_potential(spec: PotentialSpec, z):
    """V(z) for scalar or array z. Boundaries belong to the right-hand piece."""
    zarr = np.asarray(z, dtype=float)
    if spec.kind is PotentialKind.BIPARABOLIC:
        m = np.floor(zarr / math.pi + 0.5)
        d = zarr - m * math.pi
        even = np.mod(m, 2.0) == 0
        out = np.where(even, spec.V - spec.chi * d * d, spec.chi * d * d)
    else:
        zr = np.mod(zarr, TWO_PI)
        hb = spec.barrier_half_width
        inside = (zr < hb) | (zr >= TWO_PI - hb)
        out = np.where(inside, spec.V, 0.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def region_of(z: float, spec: PotentialSpec | None = None) -> Region:
    """Region of a point of the canonical cell; the junction belongs to the barrier."""
    start = math.pi / 2 if spec is None else spec.cell_start
    junction = 1.5 * math.pi if spec is None else spec.junction
    zr = start + math.fmod(z - start, TWO_PI)
    if zr < start:
        zr += TWO_PI
    return Region.WELL if zr < junction else Region.BARRIER
