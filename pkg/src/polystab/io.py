"""JSON (de)serialisation of block systems and a canonical content digest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import replace
from pathlib import Path
from typing import Union

import numpy as np

from .blocks import FULL, KINDS, LOWER_TRIANGULAR, TRIANGULAR, BlockSystem, CouplingFactors, Exponents
from .errors import ValidationError
from .spectral import DiagonalGenerator, OperatorMatrix, polynomial_damped, shifted_imaginary
from .waves import WaveSpec, assemble_wave1d_placed, assemble_wave2d, build_coupled_wave


class InputParseError(ValidationError):
    """The input is not valid JSON; carries the line and column."""

    def __init__(self, source: str, exc: json.JSONDecodeError):
        self.lineno, self.colno = exc.lineno, exc.colno
        super().__init__(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}")


def _entry(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValidationError(f"complex entries are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError(f"matrix entries must be numbers or [re, im] pairs, got {x!r}")
    return complex(x)


def decode_matrix(rows, name="matrix") -> np.ndarray:
    if not isinstance(rows, list):
        raise ValidationError(f"{name} must be a list of rows")
    if not rows:
        raise ValidationError(f"{name} must not be empty")
    if any(not isinstance(r, list) for r in rows):
        raise ValidationError(f"{name} must be a list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValidationError(f"{name} rows have different lengths")
    return np.array([[_entry(x) for x in r] for r in rows], dtype=complex).reshape(len(rows), width)


def encode_matrix(m) -> list:
    m = np.asarray(m)
    if np.all(np.imag(m) == 0):
        return [[float(x) for x in row] for row in np.real(m)]
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


GENERATORS = ("shifted_imaginary", "polynomial_damped", "wave2d", "wave1d_placed")


def _take(params: dict, key: str, name: str):
    if key not in params:
        raise ValidationError(f"generator {name!r} needs parameter {key!r}")
    return params.pop(key)


def _named_block(name: str, params: dict):
    params = dict(params or {})
    if name in ("wave2d", "wave1d_placed"):
        spec = WaveSpec.from_json_dict(params)
        return assemble_wave2d(spec) if name == "wave2d" else assemble_wave1d_placed(spec)
    if name == "shifted_imaginary":
        block = shifted_imaginary(int(_take(params, "n", name)), float(params.pop("sigma", 1.0)))
    elif name == "polynomial_damped":
        block = polynomial_damped(int(_take(params, "n", name)), float(_take(params, "alpha", name)))
    else:
        raise ValidationError(f"unknown generator {name!r}; known: {', '.join(GENERATORS)}")
    if params:
        raise ValidationError(f"unknown parameters for {name}: {sorted(params)}")
    return block


def decode_block(data, name: str):
    """A diagonal block: named generator, eigenvalue list or dense matrix."""
    if not isinstance(data, dict):
        raise ValidationError(f"{name} must be an object")
    if "generator" in data:
        return _named_block(data["generator"], data.get("params"))
    if "eigenvalues" in data:
        return DiagonalGenerator.from_json_dict(data)
    if "matrix" in data:
        return decode_matrix(data["matrix"], f"{name}.matrix")
    raise ValidationError(f"{name} needs one of 'generator', 'eigenvalues' or 'matrix'")


def _decode_coupling(data, name) -> CouplingFactors:
    if not isinstance(data, dict) or "left" not in data or "right" not in data:
        raise ValidationError(f"coupling {name} needs 'left' and 'right'")
    return CouplingFactors(
        OperatorMatrix(decode_matrix(data["left"], f"{name}.left")),
        OperatorMatrix(decode_matrix(data["right"], f"{name}.right")),
        bool(data.get("finite", True)),
    )


TOP_KEYS = {"kind", "a1", "a2", "couplings", "exponents", "allow_unstable", "wave"}


def system_from_dict(data: dict) -> BlockSystem:
    """Build a :class:`BlockSystem` from its JSON object."""
    if not isinstance(data, dict):
        raise ValidationError("a system spec must be a JSON object")
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise ValidationError(f"unknown top-level keys: {sorted(unknown)}")
    if "wave" in data:
        sys = build_coupled_wave(WaveSpec.from_json_dict(data["wave"] or {}))
        if "exponents" in data:
            sys = replace(sys, exponents=Exponents.from_json_dict(data["exponents"]))
        return sys
    kind = data.get("kind")
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {KINDS}, got {kind!r}")
    b1 = decode_block(data.get("a1"), "a1")
    b2 = decode_block(data.get("a2"), "a2")
    gen1 = b1 if isinstance(b1, DiagonalGenerator) else None
    gen2 = b2 if isinstance(b2, DiagonalGenerator) else None
    couplings = data.get("couplings") or {}
    unknown = set(couplings) - {"12", "21"}
    if unknown:
        raise ValidationError(f"couplings keys are '12' and '21', got {sorted(unknown)}")
    c12 = _decode_coupling(couplings["12"], "12") if "12" in couplings else None
    c21 = _decode_coupling(couplings["21"], "21") if "21" in couplings else None
    return BlockSystem(
        kind,
        gen1.matrix() if gen1 else b1,
        gen2.matrix() if gen2 else b2,
        coupling_12=c12, coupling_21=c21,
        exponents=Exponents.from_json_dict(data.get("exponents")),
        gen1=gen1, gen2=gen2,
        allow_unstable=bool(data.get("allow_unstable", False)),
    )


def _encode_block(a, gen):
    if gen is not None:
        return gen.to_json_dict()
    return {"matrix": encode_matrix(a)}


def _encode_coupling(c: CouplingFactors) -> dict:
    return {"left": encode_matrix(c.left), "right": encode_matrix(c.right),
            "finite": c.coupling_dim_finite}


def system_to_dict(sys: BlockSystem) -> dict:
    couplings = {}
    if sys.kind in (TRIANGULAR, FULL):
        couplings["12"] = _encode_coupling(sys.coupling_12)
    if sys.kind in (LOWER_TRIANGULAR, FULL):
        couplings["21"] = _encode_coupling(sys.coupling_21)
    out = {
        "kind": sys.kind,
        "a1": _encode_block(sys.a1, sys.gen1),
        "a2": _encode_block(sys.a2, sys.gen2),
        "couplings": couplings,
        "exponents": sys.exponents.to_json_dict(),
    }
    if sys.allow_unstable:
        out["allow_unstable"] = True
    return out


def parse_json(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputParseError(source, exc) from None


def load_system(path: Union[str, Path]):
    """Read a system spec file. Returns ``(system, parsed_json)``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    data = parse_json(text, str(path))
    return system_from_dict(data), data


def dump_system(sys: BlockSystem, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(system_to_dict(sys), indent=2) + "\n")


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def canonical_digest(data) -> str:
    """SHA-256 of the key-sorted compact JSON form, so key order is irrelevant."""
    return hashlib.sha256(canonical_json(data).encode()).hexdigest()
