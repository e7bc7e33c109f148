"""Invariant suite behind ``blochlab selfcheck``.

Each category records its worst residual against a fixed threshold. A
category that raises counts as failed with an infinite residual, so a
broken convention shows up as a failure rather than a crash.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import Mode, barrier_pair, well_pair
from .bloch import assemble_state, ode_residual
from .dispersion import find_bands, g_quad, rhs_dispersion
from .errors import BlochLabError
from .oracle import kp_trace_analytic, monodromy_of
from .potential import PotentialKind, PotentialSpec, make_biparabolic, make_kronig_penney
from .specfun import bessel_j, gamma_fn, kummer_m, verify_bessel_hypergeometric_identity

__all__ = ["CheckResult", "run_selfcheck", "THRESHOLDS"]

THRESHOLDS = {
    "specfun": 1e-12,
    "wronskian": 1e-9,
    "dual_form": 1e-8,
    "monodromy": 1e-6,
    "monodromy_det": 1e-9,
    "kp_closed_form": 1e-9,
    "normalization": 1e-8,
    "continuity": 1e-8,
    "bloch_translation": 1e-8,
    "ode_residual": 1e-6,
}


@dataclass(frozen=True)
class CheckResult:
    category: str
    worst: float
    threshold: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.worst <= self.threshold

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{tag} {self.category:<18} worst={self.worst:.3e} threshold={self.threshold:.0e}{extra}"


def _specfun_residual() -> float:
    worst = 0.0
    for nu in (-0.75, -0.25, 0.25, 0.75):
        for x in (0.3, 1.0, 2.5, 6.0):
            worst = max(worst, verify_bessel_hypergeometric_identity(nu, x))
            if nu > 0:
                # three-term recurrence J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu
                r = bessel_j(nu - 1, x) + bessel_j(nu + 1, x) - 2 * nu / x * bessel_j(nu, x)
                worst = max(worst, abs(r))
    for a, b, x in ((0.3 - 0.2j, 0.5, 2.0), (0.8, 1.5, -3.0), (0.25 + 1.1j, 0.5, -4j)):
        lhs = kummer_m(a, b, x).value
        rhs = np.exp(x) * kummer_m(b - a, b, -x).value
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    for x in (0.1, 0.25, 0.4):
        worst = max(worst, abs(gamma_fn(x) * gamma_fn(1 - x) * math.sin(math.pi * x) / math.pi - 1))
    return worst


def _potentials(quick: bool) -> list[PotentialSpec]:
    if quick:
        return [make_biparabolic(1.4494), make_kronig_penney(1.668)]
    return [make_biparabolic(1.4494), make_biparabolic(18.65), make_kronig_penney(1.668)]


def run_selfcheck(quick: bool = False, *, inject_sign_error: bool = False) -> list[CheckResult]:
    """Run every category; ``inject_sign_error`` corrupts the junction-sign convention on purpose."""
    results: list[CheckResult] = []
    n_e = 5 if quick else 20
    n_bands = 2 if quick else 3

    def record(cat: str, fn: Callable[[], float]) -> None:
        try:
            worst = float(fn())
            results.append(CheckResult(cat, worst, THRESHOLDS[cat]))
        except (BlochLabError, ArithmeticError, ValueError) as exc:
            results.append(CheckResult(cat, math.inf, THRESHOLDS[cat], f"{type(exc).__name__}: {exc}"))

    record("specfun", _specfun_residual)

    specs = _potentials(quick)
    bands = {}
    for spec in specs:
        try:
            bands[spec] = [b for b in find_bands(spec, Mode.EXACT) if not b.truncated][:n_bands]
        except BlochLabError:
            bands[spec] = []

    def energies(spec):
        out = []
        for b in bands[spec]:
            inset = 1e-3 * b.width
            out.extend(np.linspace(b.e_left + inset, b.e_right - inset, n_e))
        return np.array(out)

    def wronskian():
        worst = 0.0
        for spec in specs:
            E = energies(spec)
            for z in (0.3, 1.0, spec.well_half_width):
                worst = max(worst, np.max(np.abs(well_pair(spec, Mode.EXACT, E, z).wronskian - 1)))
            for z in (-spec.barrier_half_width, 0.4, spec.barrier_half_width):
                worst = max(worst, np.max(np.abs(barrier_pair(spec, Mode.EXACT, E, z).wronskian - 1)))
        return worst

    def dual_form():
        worst = 0.0
        for spec in specs:
            E = energies(spec)
            q = g_quad(E, spec, Mode.EXACT, inject_sign_error=inject_sign_error)
            worst = max(worst, float(np.max(np.abs(q.determinant_residual))))
        return worst

    mono_det = [math.inf]  # stays infinite if the monodromy pass never runs

    def monodromy():
        worst = 0.0
        mono_det[0] = 0.0
        for spec in specs:
            for E in energies(spec)[:: 4 if quick else 2]:
                m = monodromy_of(spec, float(E))
                mono_det[0] = max(mono_det[0], m.scaled_det_residual)
                rhs = rhs_dispersion(float(E), spec, Mode.EXACT, inject_sign_error=inject_sign_error)
                worst = max(worst, abs(rhs - m.half_trace))
        return worst

    def kp_closed():
        worst = 0.0
        for spec in specs:
            if spec.kind is not PotentialKind.KRONIG_PENNEY:
                continue
            for E in np.linspace(0.2, 3.0, 8 if quick else 30):
                t = kp_trace_analytic(float(E), spec.V, spec.barrier_fraction)
                worst = max(worst, abs(t - monodromy_of(spec, float(E)).half_trace))
        return worst

    record("wronskian", wronskian)
    record("dual_form", dual_form)
    record("monodromy", monodromy)
    record("monodromy_det", lambda: mono_det[0])
    record("kp_closed_form", kp_closed)

    states = []

    def build_states():
        for spec in specs:
            for b in bands[spec]:
                for E in np.linspace(b.e_left, b.e_right, 3 if quick else 5):
                    states.append(assemble_state(float(E), b, spec, Mode.EXACT))
        if not states:
            raise BlochLabError("no states assembled")
        return max(s.norm_residual for s in states)

    record("normalization", build_states)
    record("continuity", lambda: max(s.continuity_residual for s in states) if states else math.inf)
    record("bloch_translation", lambda: max(s.bloch_residual for s in states) if states else math.inf)
    record("ode_residual", lambda: max(ode_residual(s) for s in states) if states else math.inf)
    return results
