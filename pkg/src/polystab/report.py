"""Analysis reports: a verdict, a spectral summary, fitted sweeps and checks."""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .errors import ValidationError
from .resolvent import TIME, SweepSamples
from .verdict import DeltaCertificate, SpectralReport, StabilityVerdict

try:
    from importlib.metadata import version as _pkg_version
    __tool_version__ = _pkg_version("artifact")
except Exception:  # running from a source tree without metadata
    __tool_version__ = "0.1.0"


@dataclass(frozen=True)
class Expectation:
    """A machine-checked qualitative claim, e.g. "eigenvalue within 1e-8 of 5i"."""

    name: str
    description: str
    holds: bool
    value: Optional[float] = None

    def to_json_dict(self) -> dict:
        return {"name": self.name, "description": self.description,
                "holds": bool(self.holds), "value": self.value}


def provenance() -> dict:
    return {"tool": "polystab", "version": __tool_version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}


@dataclass
class AnalysisReport:
    system_digest: str
    verdict: StabilityVerdict
    spectral: SpectralReport
    sweeps: Dict[str, SweepSamples] = field(default_factory=dict)
    delta: Optional[DeltaCertificate] = None
    expectations: List[Expectation] = field(default_factory=list)
    example_id: Optional[str] = None
    params: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=provenance)

    def __post_init__(self):
        for name, sweep in self.sweeps.items():
            if sweep.fit is None:
                raise ValidationError(f"sweep {name!r} has no fit; every reported sweep needs one")

    @property
    def passed(self) -> bool:
        return all(e.holds for e in self.expectations)

    def to_json_dict(self) -> dict:
        sweeps = {}
        for name, s in sorted(self.sweeps.items()):
            sweeps[name] = {"axis": s.axis, "n_samples": int(s.params.size),
                            "n_finite": int(s.finite.sum()), "csv": f"{name}.csv",
                            "fit": s.fit.to_json_dict(window=s.window)}
            sweeps[name]["window"] = [float(s.window[0]), float(s.window[1])]
        return {
            "system_digest": self.system_digest,
            "example": self.example_id,
            "params": self.params,
            "verdict": self.verdict.to_json_dict(),
            "spectral": self.spectral.to_json_dict(),
            "sweeps": sweeps,
            "delta": None if self.delta is None else self.delta.to_json_dict(),
            "expectations": [e.to_json_dict() for e in self.expectations],
            "passed": self.passed,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True, default=_json_default) + "\n"

    def write(self, out_dir) -> List[Path]:
        """Write ``report.json`` and one CSV per sweep; returns the paths."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, s in sorted(self.sweeps.items()):
            path = out / f"{name}.csv"
            path.write_text(s.to_csv("t" if s.axis == TIME else "param"))
            written.append(path)
        path = out / "report.json"
        path.write_text(self.to_json())
        written.append(path)
        return written

    def summary_lines(self) -> List[str]:
        v = self.verdict
        lines = [f"system {self.system_digest[:12]}"]
        if v.applicable is not None:
            lines.append(f"verdict: {v.applicable.value}, alpha = {v.to_json_dict()['alpha_exact']}"
                         + (" (conditional on delta)" if v.conditional else ""))
        else:
            lines.append(f"verdict: none ({v.notes})")
        for k, m in v.condition_margins.items():
            lines.append(f"  margin {k} = {m}")
        sp = self.spectral
        lines.append(f"spectral abscissa {sp.abscissa:.6g}, axis distance {sp.axis_distance:.3g}"
                     + (" [imaginary-axis eigenvalue]" if sp.imaginary_axis_eigenvalue else ""))
        for name, s in sorted(self.sweeps.items()):
            lines.append(f"sweep {name}: slope {s.fit.slope:.4f} on [{s.window[0]:.4g}, {s.window[1]:.4g}]")
        if self.delta is not None:
            lines.append(f"loop norm max {self.delta.loop_norm_max:.6g}, "
                         f"min s(D) {self.delta.d_min_singular:.3g} ({self.delta.method})")
        for e in self.expectations:
            lines.append(f"[{'PASS' if e.holds else 'FAIL'}] {e.description}")
        return lines


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")
