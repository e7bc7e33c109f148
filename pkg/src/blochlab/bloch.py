"""Normalised Bloch states, density surfaces and barrier-region probability.

A state in the canonical cell is

    well:     Psi(z) = c1 f1(z - pi) + c2 f2(z - pi)
    barrier:  Psi(z) = cb1 g1(z - 2pi) + cb2 g2(z - 2pi)

with Psi(z + 2pi) = exp(2 pi i P) Psi(z). Writing lam = exp(2 pi i P),
matching at both ends of the barrier gives, with c1 as the free coefficient,

    c2  = G11 (lam + 1) / (G21 (lam - 1)) c1
    cb1 = (lam + 1) / (2 G21) c1
    cb2 = (lam - 1) / (2 G22) c1

and, with c2 free,

    c1  = G21 (lam - 1) / (G11 (lam + 1)) c2
    cb1 = (lam - 1) / (2 G11) c2
    cb2 = (lam + 1) / (2 G12) c2.

Inside a band no G_ij vanishes, so either set works. At a band edge the
set whose denominators stay finite is chosen; the single remaining 0/0
ratio (G11/(lam - 1) or G21/(lam + 1)) is taken as a one-sided limit.
The free coefficient is real and positive and fixed by normalising
|Psi|^2 to one over a full period.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .basis import Mode, barrier_pair, well_pair
from .dispersion import Band, EdgeCondition, find_bands, g_quad, quasimomentum_of, top_band
from .errors import EdgeDegeneracyError
from .potential import PotentialKind, PotentialSpec, eval_potential
from .quadrature import adaptive_gauss_legendre

__all__ = [
    "BlochState",
    "DensitySurface",
    "AnomalyEntry",
    "assemble_state",
    "conjugate_state",
    "psi",
    "evaluate_density",
    "barrier_probability",
    "well_probability",
    "ode_residual",
    "anomaly_scan",
    "anomaly_entry",
    "anomaly_report",
    "default_threads",
]

QUAD_TOL = 1e-10
EDGE_INSET = 1e-4
EDGE_STEP = 1e-6
ON_EDGE = 1e-9
MONOTONE_STEP = 1e-8


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("BLOCHLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class BlochState:
    energy: float
    P: float
    band_n: int
    c1: complex
    c2: complex
    cbar1: complex
    cbar2: complex
    mode: Mode
    spec: PotentialSpec
    norm_residual: float = 0.0
    continuity_residual: float = 0.0
    bloch_residual: float = 0.0
    well_prob: float = 0.0
    barrier_prob: float = 0.0

    @property
    def phase(self) -> complex:
        return cmath.exp(2j * math.pi * self.P)


def _region_parts(spec: PotentialSpec, mode: Mode, E: float, c1, c2, cb1, cb2):
    """Closures returning (Psi, Psi') on local coordinates of each region."""

    def well(z1):
        p = well_pair(spec, mode, E, z1)
        return c1 * p.f1 + c2 * p.f2, c1 * p.df1 + c2 * p.df2

    def barrier(z2):
        p = barrier_pair(spec, mode, E, z2)
        return cb1 * p.f1 + cb2 * p.f2, cb1 * p.df1 + cb2 * p.df2

    return well, barrier


def _region_integrals(spec, mode, E, c1, c2, cb1, cb2, tol=QUAD_TOL):
    well, barrier = _region_parts(spec, mode, E, c1, c2, cb1, cb2)
    hw, hb = spec.well_half_width, spec.barrier_half_width
    iw = adaptive_gauss_legendre(lambda z: np.abs(well(z)[0]) ** 2, -hw, hw, tol)
    ib = adaptive_gauss_legendre(lambda z: np.abs(barrier(z)[0]) ** 2, -hb, hb, tol)
    return iw, ib


def _lam(E: float, band: Band | None, spec: PotentialSpec, mode: Mode) -> tuple[float, complex]:
    P = quasimomentum_of(E, band, spec, mode)
    return P, cmath.exp(2j * math.pi * P)


def _edge_limit(ratio, E: float, inward: float, step: float = EDGE_STEP) -> complex:
    """Limit of ratio(E') as E' -> E from inside the band.

    Near a simple edge the numerator G vanishes linearly in the energy
    offset while lam -+ 1 vanishes like its square root, so the ratio
    itself shrinks like a square root: a tenfold drop between offsets of
    step and step/100 identifies a zero limit.
    """
    r1 = ratio(E + inward * step)
    r2 = ratio(E + inward * step * 1e-2)
    if abs(r2) <= 0.5 * abs(r1):
        return 0j
    if abs(r2 - r1) <= 1e-4 * max(abs(r1), 1e-300):
        return r2
    raise EdgeDegeneracyError(f"edge limit at E={E} does not settle: {r1} vs {r2}")


def _edge_at(E: float, band: Band) -> EdgeCondition | None:
    """Condition of the band edge E sits on, if any."""
    for edge, cond in ((band.e_left, band.left_edge_condition), (band.e_right, band.right_edge_condition)):
        if cond is not None and abs(E - edge) <= ON_EDGE * max(1.0, abs(E)):
            return cond
    return None


def _coefficients(E: float, band: Band, spec: PotentialSpec, mode: Mode):
    edge = _edge_at(E, band)
    if edge is not None:
        # pin P: near an edge it moves like the square root of the offset
        P = 0.0 if edge.rhs_sign > 0 else 0.5
        lam = complex(edge.rhs_sign, 0.0)
        even = edge in (EdgeCondition.G11, EdgeCondition.G12)
    else:
        P, lam = _lam(E, band, spec, mode)
        if band.left_edge_condition is not None:
            even = band.left_edge_condition in (EdgeCondition.G11, EdgeCondition.G12)
        else:
            even = band.index_n % 2 == 0
    q = g_quad(E, spec, mode)
    inward = 1.0 if abs(E - band.e_left) <= abs(E - band.e_right) else -1.0
    step = min(EDGE_STEP, 1e-2 * band.width)

    def ratio_even(x):
        _, lx = _lam(x, band, spec, mode)
        return g_quad(x, spec, mode).g11 / (lx - 1)

    def ratio_odd(x):
        _, lx = _lam(x, band, spec, mode)
        return g_quad(x, spec, mode).g21 / (lx + 1)

    if even:
        r = _edge_limit(ratio_even, E, inward, step) if edge is EdgeCondition.G11 else q.g11 / (lam - 1)
        c1 = 1.0 + 0j
        c2 = r * (lam + 1) / q.g21
        cb1 = (lam + 1) / (2 * q.g21)
        cb2 = (lam - 1) / (2 * q.g22)
    else:
        r = _edge_limit(ratio_odd, E, inward, step) if edge is EdgeCondition.G21 else q.g21 / (lam + 1)
        c2 = 1.0 + 0j
        c1 = r * (lam - 1) / q.g11
        cb1 = (lam - 1) / (2 * q.g11)
        cb2 = (lam + 1) / (2 * q.g12)
    return P, lam, c1, c2, cb1, cb2


def assemble_state(E: float, band: Band, spec: PotentialSpec, mode: Mode = Mode.EXACT) -> BlochState:
    """Normalised Bloch state at energy E of the given band."""
    P, lam, c1, c2, cb1, cb2 = _coefficients(E, band, spec, mode)
    iw, ib = _region_integrals(spec, mode, E, c1, c2, cb1, cb2)
    scale = 1.0 / math.sqrt(iw + ib)
    c1, c2, cb1, cb2 = (c * scale for c in (c1, c2, cb1, cb2))
    iw2, ib2 = _region_integrals(spec, mode, E, c1, c2, cb1, cb2)

    well, barrier = _region_parts(spec, mode, E, c1, c2, cb1, cb2)
    hw, hb = spec.well_half_width, spec.barrier_half_width
    pw, dpw = well(hw)
    pb, dpb = barrier(-hb)
    ref = max(1.0, abs(pw), abs(dpw))
    cont = max(abs(pw - pb), abs(dpw - dpb)) / ref
    p0, dp0 = well(-hw)
    p1, dp1 = barrier(hb)
    ref = max(1.0, abs(p0), abs(dp0))
    bl = max(abs(p1 - lam * p0), abs(dp1 - lam * dp0)) / ref
    return BlochState(
        energy=float(E),
        P=P,
        band_n=band.index_n,
        c1=complex(c1),
        c2=complex(c2),
        cbar1=complex(cb1),
        cbar2=complex(cb2),
        mode=mode,
        spec=spec,
        norm_residual=abs(iw2 + ib2 - 1.0),
        continuity_residual=float(cont),
        bloch_residual=float(bl),
        well_prob=iw2,
        barrier_prob=ib2,
    )


def conjugate_state(state: BlochState) -> BlochState:
    """Time-reversed partner at quasimomentum -P (basis functions are real)."""
    return BlochState(
        energy=state.energy,
        P=-state.P,
        band_n=state.band_n,
        c1=state.c1.conjugate(),
        c2=state.c2.conjugate(),
        cbar1=state.cbar1.conjugate(),
        cbar2=state.cbar2.conjugate(),
        mode=state.mode,
        spec=state.spec,
        norm_residual=state.norm_residual,
        continuity_residual=state.continuity_residual,
        bloch_residual=state.bloch_residual,
        well_prob=state.well_prob,
        barrier_prob=state.barrier_prob,
    )


def psi(state: BlochState, z) -> tuple[np.ndarray, np.ndarray]:
    """Psi and Psi' at points of the canonical cell (junction belongs to the barrier)."""
    spec = state.spec
    z = np.atleast_1d(np.asarray(z, dtype=float))
    well, barrier = _region_parts(spec, state.mode, state.energy, state.c1, state.c2, state.cbar1, state.cbar2)
    in_well = z < spec.junction
    out = np.empty(z.shape, dtype=complex)
    dout = np.empty(z.shape, dtype=complex)
    if np.any(in_well):
        out[in_well], dout[in_well] = well(z[in_well] - math.pi)
    if np.any(~in_well):
        out[~in_well], dout[~in_well] = barrier(z[~in_well] - 2.0 * math.pi)
    return out, dout


def evaluate_density(state: BlochState, z_grid: Sequence[float]) -> np.ndarray:
    return np.abs(psi(state, z_grid)[0]) ** 2


def barrier_probability(state: BlochState) -> float:
    """Probability of finding the particle in the barrier region of one cell."""
    return state.barrier_prob


def well_probability(state: BlochState) -> float:
    return state.well_prob


def _effective_coeff(state: BlochState, z: np.ndarray) -> np.ndarray:
    """U(z) - E of the equation the state's basis functions actually solve."""
    spec, E = state.spec, state.energy
    if state.mode is Mode.EXACT or spec.kind is PotentialKind.KRONIG_PENNEY:
        return eval_potential(spec, z) - E
    in_well = z < spec.junction
    z2 = z - 2.0 * math.pi
    return np.where(in_well, -E, -spec.chi * z2 * z2)


def ode_residual(state: BlochState, n_per_region: int = 64, h: float = 1e-4) -> float:
    """Worst |Psi'' - (U - E) Psi| / (1 + |Psi| + |Psi''|) with Psi'' by central differences."""
    spec = state.spec
    pad = 10 * h
    zw = np.linspace(spec.cell_start + pad, spec.junction - pad, n_per_region)
    zb = np.linspace(spec.junction + pad, spec.cell_end - pad, n_per_region)
    z = np.concatenate([zw, zb])
    p0 = psi(state, z)[0]
    pp = psi(state, z + h)[0]
    pm = psi(state, z - h)[0]
    d2 = (pp - 2.0 * p0 + pm) / (h * h)
    res = np.abs(d2 - _effective_coeff(state, z) * p0) / (1.0 + np.abs(p0) + np.abs(d2))
    return float(np.max(res))


@dataclass
class DensitySurface:
    energies: np.ndarray
    z_grid: np.ndarray
    density: np.ndarray
    barrier_prob: np.ndarray
    well_prob: np.ndarray
    band: Band
    mode: Mode

    @property
    def norms(self) -> np.ndarray:
        return self.barrier_prob + self.well_prob

    @property
    def anomaly_ratio(self) -> float:
        return float(self.barrier_prob[0] / self.barrier_prob[-1])

    @property
    def monotone_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.barrier_prob) < -MONOTONE_STEP))

    def density_csv(self) -> str:
        lines = ["E,z,density"]
        for i, E in enumerate(self.energies):
            for z, d in zip(self.z_grid, self.density[i]):
                lines.append(f"{E:.12g},{z:.12g},{d:.12g}")
        return "\n".join(lines) + "\n"

    def barrier_csv(self) -> str:
        lines = ["E,barrier_prob"]
        lines += [f"{E:.12g},{p:.12g}" for E, p in zip(self.energies, self.barrier_prob)]
        return "\n".join(lines) + "\n"

    def write_csv(self, density_path: str | Path, barrier_path: str | Path) -> None:
        Path(density_path).write_text(self.density_csv())
        Path(barrier_path).write_text(self.barrier_csv())


def _interior_energies(band: Band, n: int) -> np.ndarray:
    inset = EDGE_INSET * band.width
    return np.linspace(band.e_left + inset, band.e_right - inset, n)


def _map(fn, items, threads: int | None):
    threads = default_threads() if threads is None else threads
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def anomaly_scan(
    spec: PotentialSpec,
    band: Band,
    n_energies: int = 20,
    n_z: int = 200,
    mode: Mode = Mode.EXACT,
    threads: int | None = None,
) -> DensitySurface:
    """|Psi|^2 on a uniform (E, z) grid across one band, edges inset by 1e-4 of its width."""
    if n_energies < 2:
        raise ValueError("n_energies must be >= 2")
    if n_z < 16:
        raise ValueError("n_z must be >= 16")
    energies = _interior_energies(band, n_energies)
    z_grid = np.linspace(spec.cell_start, spec.cell_end, n_z)
    states = _map(lambda E: assemble_state(E, band, spec, mode), energies, threads)
    density = np.vstack([evaluate_density(s, z_grid) for s in states])
    return DensitySurface(
        energies=energies,
        z_grid=z_grid,
        density=density,
        barrier_prob=np.array([s.barrier_prob for s in states]),
        well_prob=np.array([s.well_prob for s in states]),
        band=band,
        mode=mode,
    )


@dataclass(frozen=True)
class AnomalyEntry:
    n: int
    e_left: float
    e_right: float
    pbar_min_E: float
    pbar_max_E: float
    anomaly_ratio: float
    monotone: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "e_left": self.e_left,
            "e_right": self.e_right,
            "pbar_min_E": self.pbar_min_E,
            "pbar_max_E": self.pbar_max_E,
            "anomaly_ratio": self.anomaly_ratio,
            "monotone": self.monotone,
        }


def anomaly_entry(spec: PotentialSpec, band: Band, mode: Mode = Mode.EXACT, n_energies: int = 20, threads: int | None = None) -> AnomalyEntry:
    """Barrier probability at the two inset edges of a band and its monotonicity."""
    energies = _interior_energies(band, n_energies)
    pb = np.array(_map(lambda E: assemble_state(E, band, spec, mode).barrier_prob, energies, threads))
    return AnomalyEntry(
        n=band.index_n,
        e_left=band.e_left,
        e_right=band.e_right,
        pbar_min_E=float(pb[0]),
        pbar_max_E=float(pb[-1]),
        anomaly_ratio=float(pb[0] / pb[-1]),
        monotone=bool(np.all(np.diff(pb) < -MONOTONE_STEP)),
    )


def anomaly_report(
    spec: PotentialSpec,
    mode: Mode = Mode.EXACT,
    bands: list[Band] | None = None,
    n_energies: int = 20,
    e_max_scan: float | None = None,
    threads: int | None = None,
) -> list[AnomalyEntry]:
    """One entry per complete band in the scan window."""
    if bands is None:
        bands = find_bands(spec, mode, e_max_scan)
    return [anomaly_entry(spec, b, mode, n_energies, threads) for b in bands if not b.truncated]


# re-exported for callers that pick the band the anomaly reports use
top_band = top_band
