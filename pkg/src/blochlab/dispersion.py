"""Junction couplings G_ij, the dispersion relation and band-edge search.

With the well pair (f1, f2) taken at the right edge of the well and the
barrier pair (g1, g2) at the right edge of the barrier (both at the
positive half-width of their own region),

    G_ij = f_i g_j' + f_i' g_j,

and the half-trace of the period map is

    cos(2 pi P) = 1 + 2 G11 G22 = -1 + 2 G12 G21.

The two forms agree because both pairs have unit Wronskian, which is the
same statement as G12 G21 - G11 G22 = 1. At the left junction the barrier
pair sits at its negative half-width; parity (g1 even, g2 odd) is what
turns that into the plus signs above.

Every zero of some G_ij is a band edge: G11 = 0 or G22 = 0 gives
cos(2 pi P) = +1, G12 = 0 or G21 = 0 gives -1. The band finder scans for
sign changes of each G_ij separately, which stays reliable for very narrow
bands where |cos(2 pi P)| - 1 only touches zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import brentq

from .basis import Mode, barrier_pair, well_pair
from .errors import DomainError, InconsistencyError, ScanError
from .potential import PotentialKind, PotentialSpec
from .specfun import bessel_j

__all__ = [
    "EdgeCondition",
    "GQuad",
    "Band",
    "g_quad",
    "rhs_dispersion",
    "rhs_neartop_closed_form",
    "find_bands",
    "quasimomentum_of",
    "top_band",
    "bands_to_json",
    "bands_from_json",
    "PARITY_RULE",
]

DUAL_FORM_TOL = 1e-6
EDGE_TOL = 1e-10
CLAMP_TOL = 1e-9


class EdgeCondition(str, enum.Enum):
    G11 = "G11"
    G12 = "G12"
    G21 = "G21"
    G22 = "G22"

    @property
    def rhs_sign(self) -> int:
        return 1 if self in (EdgeCondition.G11, EdgeCondition.G22) else -1


# (left, right) edge conditions by band parity
PARITY_RULE = {
    0: (EdgeCondition.G11, EdgeCondition.G12),
    1: (EdgeCondition.G21, EdgeCondition.G22),
}


@dataclass(frozen=True)
class GQuad:
    g11: float
    g12: float
    g21: float
    g22: float
    energy: float

    @property
    def determinant_residual(self) -> float:
        return self.g12 * self.g21 - self.g11 * self.g22 - 1.0

    def get(self, cond: EdgeCondition) -> float:
        return getattr(self, cond.value.lower())


@dataclass(frozen=True)
class Band:
    index_n: int
    e_left: float
    e_right: float
    left_edge_condition: EdgeCondition | None
    right_edge_condition: EdgeCondition | None
    parity_rule_ok: bool | None = field(default=None, compare=False)

    @property
    def width(self) -> float:
        return self.e_right - self.e_left

    @property
    def truncated(self) -> bool:
        return self.left_edge_condition is None or self.right_edge_condition is None

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.index_n,
            "e_left": self.e_left,
            "e_right": self.e_right,
            "left_cond": None if self.left_edge_condition is None else self.left_edge_condition.value,
            "right_cond": None if self.right_edge_condition is None else self.right_edge_condition.value,
            "parity_rule_ok": self.parity_rule_ok,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Band":
        lc, rc = d.get("left_cond"), d.get("right_cond")
        return cls(
            int(d["n"]),
            float(d["e_left"]),
            float(d["e_right"]),
            None if lc is None else EdgeCondition(lc),
            None if rc is None else EdgeCondition(rc),
            d.get("parity_rule_ok"),
        )


def g_quad(E, spec: PotentialSpec, mode: Mode = Mode.EXACT, *, inject_sign_error: bool = False) -> GQuad:
    """Junction couplings at energy E (scalar, or an array for grid scans).

    ``inject_sign_error`` flips the sign between the two products
    (f g' - f' g); it exists only so the self-check can prove that the
    dual-form test catches a wrong junction convention.
    """
    if spec.kind is PotentialKind.KRONIG_PENNEY and mode is Mode.NEAR_TOP:
        raise DomainError("near-top mode is defined for the biparabolic lattice only")
    w = well_pair(spec, mode, E, spec.well_half_width)
    b = barrier_pair(spec, mode, E, spec.barrier_half_width)
    sg = -1.0 if inject_sign_error else 1.0
    return GQuad(
        g11=w.f1 * b.df1 + sg * w.df1 * b.f1,
        g12=w.f1 * b.df2 + sg * w.df1 * b.f2,
        g21=w.f2 * b.df1 + sg * w.df2 * b.f1,
        g22=w.f2 * b.df2 + sg * w.df2 * b.f2,
        energy=E if np.ndim(E) else float(E),
    )


def rhs_neartop_closed_form(E: float, chi: float) -> float:
    """Near-top dispersion: Bessel functions of u = pi^2 sqrt(chi)/8 and trig of sqrt(E)."""
    if E < 0:
        raise DomainError(f"E must be >= 0, got {E}")
    u = math.pi**2 * math.sqrt(chi) / 8.0
    jm14, jp14 = bessel_j(-0.25, u), bessel_j(0.25, u)
    jm34, jp34 = bessel_j(-0.75, u), bessel_j(0.75, u)
    r = math.sqrt(E)
    c = math.cos(math.pi * r)
    sinc = math.pi if r < 1e-12 else math.sin(math.pi * r) / r  # sin(pi r)/r
    s_times_r = math.sin(math.pi * r) * r
    bracket = (
        2.0 * u * (jm14 * jm34 - jp14 * jp34) * c
        - jm14 * jp14 * (math.pi / 2.0) * s_times_r
        - 4.0 * u * u * jm34 * jp34 * (2.0 / math.pi) * sinc
    )
    return (math.pi / 4.0) / math.sin(math.pi / 4.0) * bracket


def _rounding_scale(E: float, spec: PotentialSpec, mode: Mode, q: GQuad) -> float:
    """Size of the cancelling terms behind G11 G22 and G12 G21.

    Deep barriers make each G_ij a small difference of large products, so
    the two dispersion forms can only be expected to agree relative to this.
    """
    w = well_pair(spec, mode, E, spec.well_half_width)
    b = barrier_pair(spec, mode, E, spec.barrier_half_width)
    a = lambda fi, dfi, gj, dgj: abs(fi * dgj) + abs(dfi * gj)  # noqa: E731
    a11, a12 = a(w.f1, w.df1, b.f1, b.df1), a(w.f1, w.df1, b.f2, b.df2)
    a21, a22 = a(w.f2, w.df2, b.f1, b.df1), a(w.f2, w.df2, b.f2, b.df2)
    return max(1.0, a11 * abs(q.g22) + a22 * abs(q.g11), a12 * abs(q.g21) + a21 * abs(q.g12))


def rhs_dispersion(E: float, spec: PotentialSpec, mode: Mode = Mode.EXACT, *, inject_sign_error: bool = False) -> float:
    """cos(2 pi P) as a function of energy (may exceed 1 in magnitude in gaps)."""
    if mode is Mode.NEAR_TOP and spec.kind is PotentialKind.BIPARABOLIC and spec.chi > 0 and not inject_sign_error:
        return rhs_neartop_closed_form(E, spec.chi)
    q = g_quad(E, spec, mode, inject_sign_error=inject_sign_error)
    plus = 1.0 + 2.0 * q.g11 * q.g22
    minus = -1.0 + 2.0 * q.g12 * q.g21
    if abs(plus - minus) > DUAL_FORM_TOL * _rounding_scale(E, spec, mode, q):
        raise InconsistencyError(
            f"dispersion forms disagree at E={E}: {plus!r} vs {minus!r}"
        )
    return plus


def _refine(fn, a: float, b: float) -> float:
    return float(brentq(fn, a, b, xtol=EDGE_TOL, rtol=4 * np.finfo(float).eps, maxiter=200))


def _scan_once(spec: PotentialSpec, mode: Mode, e_lo: float, e_hi: float, de: float):
    n = max(2, int(math.ceil((e_hi - e_lo) / de)) + 1)
    grid = np.linspace(e_lo, e_hi, n)
    quads = g_quad(grid, spec, mode)
    edges: list[tuple[float, EdgeCondition]] = []
    for cond in EdgeCondition:
        vals = np.broadcast_to(quads.get(cond), grid.shape)
        fn = lambda E, c=cond: g_quad(E, spec, mode).get(c)  # noqa: E731
        for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
            edges.append((_refine(fn, grid[i], grid[i + 1]), cond))
        for i in np.flatnonzero(vals == 0):
            edges.append((float(grid[i]), cond))
    edges.sort(key=lambda t: t[0])
    return edges


def _classify(spec, mode, bounds, conds) -> list[bool] | None:
    """Band/gap flag per interval, or None if the edge set is inconsistent.

    Inside a band cos(2 pi P) runs from one of +-1 to the other, so an
    interval between edges of opposite sign is a band and one between edges
    of equal sign is a gap. The two open-ended intervals at the window
    limits are decided by the dispersion value at the window limit itself.
    Midpoint values are used as a cross-check where they are clear of +-1.
    """
    flags = []
    last = len(bounds) - 2
    for i, (a, b) in enumerate(zip(bounds[:-1], bounds[1:])):
        left, right = conds[i], conds[i + 1]
        if left is not None and right is not None:
            flag = left.rhs_sign != right.rhs_sign
        else:
            probe = a if i == 0 else b
            flag = abs(rhs_dispersion(probe, spec, mode)) <= 1.0
        mid = abs(rhs_dispersion(0.5 * (a + b), spec, mode))
        if abs(mid - 1.0) > 1e-6 and (mid < 1.0) != flag:
            return None
        flags.append(flag)
    if any(flags[i] == flags[i + 1] for i in range(last)):
        return None
    return flags


def find_bands(
    spec: PotentialSpec,
    mode: Mode = Mode.EXACT,
    e_max_scan: float | None = None,
    de_scan: float | None = None,
    *,
    max_halvings: int = 4,
) -> list[Band]:
    """Allowed bands with edges refined to 1e-10 in energy, lowest first.

    A band cut by either end of the scan window is still returned; the
    missing edge is then the window limit and its condition is ``None``.
    """
    if spec.kind is PotentialKind.KRONIG_PENNEY and mode is Mode.NEAR_TOP:
        raise DomainError("near-top mode is defined for the biparabolic lattice only")
    if e_max_scan is None:
        e_max_scan = 1.5 * spec.V + 1.0
    if not e_max_scan > 0:
        raise DomainError("e_max_scan must be positive")
    if de_scan is None:
        de_scan = 1e-3 * max(spec.V, 1.0)
    de_scan = min(de_scan, 0.01 * e_max_scan)
    for _ in range(max_halvings + 1):
        e_lo = de_scan
        edges = _scan_once(spec, mode, e_lo, e_max_scan, de_scan)
        bounds = [e_lo] + [e for e, _ in edges] + [e_max_scan]
        conds = [None] + [c for _, c in edges] + [None]
        flags = _classify(spec, mode, bounds, conds)
        if flags is not None:
            break
        de_scan *= 0.5
    else:
        raise ScanError(
            f"band and gap intervals do not alternate for {spec} even at step {de_scan:g}"
        )
    bands: list[Band] = []
    for i, in_band in enumerate(flags):
        if not in_band:
            continue
        n = len(bands)
        left, right = conds[i], conds[i + 1]
        expected = PARITY_RULE[n % 2]
        checks = [c == e for c, e in zip((left, right), expected) if c is not None]
        bands.append(
            Band(n, float(bounds[i]), float(bounds[i + 1]), left, right, all(checks) if checks else None)
        )
    return bands


def top_band(bands: list[Band], spec: PotentialSpec) -> Band:
    """Highest band whose lower edge lies below the barrier top."""
    inner = [b for b in bands if b.e_left < spec.V]
    if not inner:
        raise ScanError("no band starts below the barrier top")
    return inner[-1]


def quasimomentum_of(E: float, band: Band | None, spec: PotentialSpec, mode: Mode = Mode.EXACT) -> float:
    """P in [0, 1/2] from cos(2 pi P); rejects energies outside the band."""
    rhs = rhs_dispersion(E, spec, mode)
    if abs(rhs) > 1.0 + CLAMP_TOL:
        raise DomainError(f"E={E} is not in an allowed band (cos 2piP = {rhs})")
    return math.acos(min(1.0, max(-1.0, rhs))) / (2.0 * math.pi)


def bands_to_json(bands: list[Band]) -> list[dict[str, Any]]:
    return [b.to_dict() for b in bands]


def bands_from_json(data: list[dict[str, Any]]) -> list[Band]:
    return [Band.from_dict(d) for d in data]

