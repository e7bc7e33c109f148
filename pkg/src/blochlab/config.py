"""Run configuration shared by the command-line front end."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .basis import Mode
from .errors import BlochLabError, ConfigError
from .potential import PotentialKind, PotentialSpec, make_biparabolic

__all__ = ["ScanSettings", "GridSettings", "RunConfig", "FORMATS"]

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ScanSettings:
    e_max: float | None = None
    de: float | None = None


@dataclass(frozen=True)
class GridSettings:
    n_energies: int = 20
    n_z: int = 200


@dataclass(frozen=True)
class RunConfig:
    potential: PotentialSpec = field(default_factory=lambda: make_biparabolic(1.4494))
    mode: Mode = Mode.EXACT
    scan: ScanSettings = ScanSettings()
    grid: GridSettings = GridSettings()
    output_path: str | None = None
    format: str | None = None  # None: the command's own default
    band: str = "top"
    compare_kp: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.potential.kind is PotentialKind.KRONIG_PENNEY and self.mode is Mode.NEAR_TOP:
            raise ConfigError("near-top mode is only defined for the biparabolic potential")
        if not self.potential.V > 0:
            raise ConfigError(f"V must be positive, got {self.potential.V}")
        for name, val in (("scan.e_max", self.scan.e_max), ("scan.de", self.scan.de)):
            if val is not None and not val > 0:
                raise ConfigError(f"{name} must be positive, got {val}")
        if self.grid.n_energies < 2 or self.grid.n_z < 16:
            raise ConfigError(f"grid must be at least 2x16, got {self.grid.n_energies}x{self.grid.n_z}")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.band != "top" and not (self.band.isdigit()):
            raise ConfigError(f"band must be 'top' or a non-negative integer, got {self.band!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "potential": self.potential.to_dict(),
            "mode": self.mode.value,
            "scan": {"e_max": self.scan.e_max, "de": self.scan.de},
            "grid": {"n_energies": self.grid.n_energies, "n_z": self.grid.n_z},
            "output_path": self.output_path,
            "format": self.format,
            "band": self.band,
            "compare_kp": self.compare_kp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunConfig":
        try:
            scan = d.get("scan") or {}
            grid = d.get("grid") or {}
            return cls(
                potential=PotentialSpec.from_dict(d["potential"]) if "potential" in d else make_biparabolic(1.4494),
                mode=Mode(d.get("mode", "exact")),
                scan=ScanSettings(
                    None if scan.get("e_max") is None else float(scan["e_max"]),
                    None if scan.get("de") is None else float(scan["de"]),
                ),
                grid=GridSettings(int(grid.get("n_energies", 20)), int(grid.get("n_z", 200))),
                output_path=d.get("output_path"),
                format=None if d.get("format") is None else str(d["format"]),
                band=str(d.get("band", "top")),
                compare_kp=bool(d.get("compare_kp", False)),
            )
        except ConfigError:
            raise
        except (BlochLabError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(text)
