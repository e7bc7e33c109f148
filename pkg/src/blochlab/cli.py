"""Command-line front end: ``blochlab {bands,surface,anomaly,selfcheck}``.

Data go to ``--out`` when given (summary lines on stdout), otherwise data
go to stdout and the summary to stderr. Exit codes: 0 ok, 1 bad
configuration, 2 computation failure, 3 self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from .basis import Mode
from .bloch import AnomalyEntry, DensitySurface, anomaly_report, anomaly_scan
from .config import GridSettings, RunConfig, ScanSettings
from .dispersion import Band, find_bands, top_band
from .errors import BlochLabError, ConfigError
from .potential import PotentialKind, PotentialSpec, make_biparabolic, make_kronig_penney
from .selfcheck import run_selfcheck

__all__ = ["main", "build_parser", "resolve_config"]

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_SELFCHECK = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means "computation" here
        raise ConfigError(message)


def _grid(text: str) -> tuple[int, int]:
    try:
        n, m = (int(p) for p in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must look like NxM, got {text!r}") from exc
    return n, m


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--potential", choices=["biparabolic", "kp"])
    common.add_argument("--V", type=float, dest="V", help="barrier height in recoil units")
    common.add_argument("--mode", choices=[m.value for m in Mode])
    common.add_argument("--band", help="band index or 'top' (highest band starting below V)")
    common.add_argument("--grid", type=_grid, help="NxM: energies x z points")
    common.add_argument("--scan-max", type=float, dest="scan_max", help="upper end of the energy scan")
    common.add_argument("--out", help="output file")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--compare-kp", action="store_true", dest="compare_kp", default=None)

    parser = _Parser(prog="blochlab", description="Bloch bands and states of the biparabolic lattice.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("bands", parents=[common], help="band table")
    sub.add_parser("surface", parents=[common], help="|psi|^2 surface across one band")
    sub.add_parser("anomaly", parents=[common], help="barrier-probability report per band")
    sc = sub.add_parser("selfcheck", help="invariant suite")
    sc.add_argument("--quick", action="store_true")
    sc.add_argument("--inject-sign-error", action="store_true", dest="inject_sign_error", help=argparse.SUPPRESS)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    pot = cfg.potential
    if args.potential is not None or args.V is not None:
        kind = args.potential or ("kp" if pot.kind is PotentialKind.KRONIG_PENNEY else "biparabolic")
        V = pot.V if args.V is None else args.V
        if not V > 0:
            raise ConfigError(f"--V must be positive, got {V}")
        pot = make_kronig_penney(V, pot.barrier_fraction) if kind == "kp" else make_biparabolic(V)
    changes: dict[str, Any] = {"potential": pot}
    if args.mode is not None:
        changes["mode"] = Mode(args.mode)
    if args.band is not None:
        changes["band"] = args.band
    if args.grid is not None:
        changes["grid"] = GridSettings(*args.grid)
    if args.scan_max is not None:
        changes["scan"] = ScanSettings(args.scan_max, cfg.scan.de)
    if args.out is not None:
        changes["output_path"] = args.out
    if args.format is not None:
        changes["format"] = args.format
    if args.compare_kp is not None:
        changes["compare_kp"] = args.compare_kp
    return replace(cfg, **changes)


class _Sink:
    """Routes data and summary lines according to whether --out was given."""

    def __init__(self, cfg: RunConfig):
        self.path = cfg.output_path
        self.summary = sys.stdout if self.path else sys.stderr

    def say(self, line: str) -> None:
        print(line, file=self.summary)

    def data(self, text: str, path: str | None = None) -> None:
        target = path or self.path
        if target:
            Path(target).write_text(text)
        else:
            sys.stdout.write(text)


def _bands(cfg: RunConfig, spec: PotentialSpec | None = None) -> list[Band]:
    return find_bands(spec or cfg.potential, cfg.mode, cfg.scan.e_max, cfg.scan.de)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _head(cfg: RunConfig, spec: PotentialSpec | None = None) -> dict[str, Any]:
    return {"potential": (spec or cfg.potential).to_dict(), "mode": cfg.mode.value}


def cmd_bands(cfg: RunConfig) -> int:
    spec = cfg.potential
    bands = _bands(cfg)
    sink = _Sink(cfg)
    if not bands:
        raise BlochLabError("no bands in the scan window")
    top = top_band(bands, spec) if any(b.e_left < spec.V for b in bands) else None
    for b in bands:
        cond = f"{_fmt(b.left_edge_condition and b.left_edge_condition.value) or '-'}/{_fmt(b.right_edge_condition and b.right_edge_condition.value) or '-'}"
        extra = "  truncated" if b.truncated else ""
        if b.parity_rule_ok is False:
            extra += "  edge-parity-swapped"
        if b is top:
            extra += f"  top  E_max-V={b.e_right - spec.V:+.6g}"
        sink.say(f"band {b.index_n}: [{b.e_left:.10g}, {b.e_right:.10g}] width={b.width:.4g} edges={cond}{extra}")
    gaps = [hi.e_left - lo.e_right for lo, hi in zip(bands[:-1], bands[1:])]
    if gaps:
        sink.say(f"gaps: {len(gaps)}, largest {max(gaps):.4g}, smallest {min(gaps):.4g}")
    if (cfg.format or "json") == "json":
        sink.data(json.dumps({**_head(cfg), "bands": [b.to_dict() for b in bands]}, indent=2) + "\n")
    else:
        rows = [[_fmt(v) for v in b.to_dict().values()] for b in bands]
        sink.data(_csv_text(list(bands[0].to_dict()), rows))
    return EXIT_OK


def _select_band(cfg: RunConfig, bands: list[Band]) -> Band:
    if cfg.band == "top":
        return top_band(bands, cfg.potential)
    n = int(cfg.band)
    if not 0 <= n < len(bands):
        raise BlochLabError(f"band {n} out of range: {len(bands)} bands in the scan window")
    return bands[n]


def _barrier_path(path: str) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + "_barrier" + (p.suffix or ".csv")))


def cmd_surface(cfg: RunConfig) -> int:
    bands = _bands(cfg)
    band = _select_band(cfg, bands)
    surf: DensitySurface = anomaly_scan(cfg.potential, band, cfg.grid.n_energies, cfg.grid.n_z, cfg.mode)
    sink = _Sink(cfg)
    sink.say(
        f"band {band.index_n} [{band.e_left:.10g}, {band.e_right:.10g}]: "
        f"{len(surf.energies)}x{len(surf.z_grid)} grid, barrier_prob {surf.barrier_prob[0]:.6g} -> {surf.barrier_prob[-1]:.6g}, "
        f"ratio {surf.anomaly_ratio:.6g}, strictly decreasing: {surf.monotone_decreasing}"
    )
    if (cfg.format or "csv") == "json":
        payload = {
            **_head(cfg),
            "band": band.to_dict(),
            "energies": surf.energies.tolist(),
            "z": surf.z_grid.tolist(),
            "density": surf.density.tolist(),
            "barrier_prob": surf.barrier_prob.tolist(),
        }
        sink.data(json.dumps(payload) + "\n")
    elif sink.path:
        sink.data(surf.density_csv())
        bpath = _barrier_path(sink.path)
        sink.data(surf.barrier_csv(), bpath)
        sink.say(f"wrote {sink.path} and {bpath}")
    else:
        sink.data(surf.density_csv() + "\n" + surf.barrier_csv())
    return EXIT_OK


def _report(cfg: RunConfig, spec: PotentialSpec) -> tuple[list[Band], list[AnomalyEntry]]:
    bands = _bands(cfg, spec)
    return bands, anomaly_report(spec, cfg.mode, bands, cfg.grid.n_energies)


def _top_entry(spec: PotentialSpec, bands: list[Band], entries: list[AnomalyEntry]) -> AnomalyEntry | None:
    try:
        n = top_band(bands, spec).index_n
    except BlochLabError:
        return None
    return next((e for e in entries if e.n == n), None)


def cmd_anomaly(cfg: RunConfig) -> int:
    spec = cfg.potential
    sink = _Sink(cfg)
    bands, entries = _report(cfg, spec)
    sections = [(spec, bands, entries)]
    if cfg.compare_kp:
        if spec.kind is PotentialKind.KRONIG_PENNEY:
            raise ConfigError("--compare-kp needs the biparabolic potential as the primary one")
        kp = make_kronig_penney(spec.V)
        kp_cfg = replace(cfg, mode=Mode.EXACT)
        kp_bands, kp_entries = _report(kp_cfg, kp)
        sections.append((kp, kp_bands, kp_entries))
    tops = []
    for sp, bs, es in sections:
        for e in es:
            sink.say(
                f"{sp.kind.value} band {e.n}: [{e.e_left:.8g}, {e.e_right:.8g}] "
                f"barrier_prob {e.pbar_min_E:.6g} -> {e.pbar_max_E:.6g} ratio {e.anomaly_ratio:.6g} monotone={e.monotone}"
            )
        tops.append(_top_entry(sp, bs, es))
    if cfg.compare_kp and all(tops):
        verdict = "stronger" if tops[0].anomaly_ratio > tops[1].anomaly_ratio else "not stronger"
        sink.say(
            f"top sub-barrier band: biparabolic ratio {tops[0].anomaly_ratio:.6g} vs kronig_penney {tops[1].anomaly_ratio:.6g} ({verdict})"
        )
    if (cfg.format or "json") == "json":
        payload: dict[str, Any] = {**_head(cfg), "entries": [e.to_dict() for e in entries]}
        if cfg.compare_kp:
            payload["kronig_penney"] = {**_head(kp_cfg, kp), "entries": [e.to_dict() for e in sections[1][2]]}
        sink.data(json.dumps(payload, indent=2) + "\n")
    else:
        header = ["potential", *AnomalyEntry.__dataclass_fields__]
        rows = [[sp.kind.value, *(_fmt(v) for v in e.to_dict().values())] for sp, _, es in sections for e in es]
        sink.data(_csv_text(header, rows))
    return EXIT_OK


def cmd_selfcheck(quick: bool, inject_sign_error: bool = False) -> int:
    results = run_selfcheck(quick, inject_sign_error=inject_sign_error)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("selfcheck: " + ("all categories passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_SELFCHECK


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "selfcheck":
            return cmd_selfcheck(args.quick, args.inject_sign_error)
        cfg = resolve_config(args)
        handler = {"bands": cmd_bands, "surface": cmd_surface, "anomaly": cmd_anomaly}[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print(f"blochlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlochLabError, ArithmeticError) as exc:
        print(f"blochlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
