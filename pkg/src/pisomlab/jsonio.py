"""Shared JSON encoding and input-file parsing.

Complex scalars are encoded as a two-element array [re, im] of doubles and
matrices as arrays of rows; this encoding is shared by every module.  Bare
numbers are accepted on input as a convenience for hand-written fixtures and
are always written back in the strict form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .numlin import PisomError, ToleranceConfig
from .sgroup import GeneratorSet, Limits, generator_set
from .invsg import InverseSemigroupTable, table_from_dict


class ParseError(PisomError):
    pass


class SchemaError(PisomError):
    pass


def scalar_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def scalar_from_json(obj, where: str) -> complex:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if (isinstance(obj, list) and len(obj) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)):
        return complex(obj[0], obj[1])
    raise SchemaError(f"{where}: expected [re, im] or a number, got {obj!r}")


def matrix_to_json(a) -> list:
    m = np.asarray(a, dtype=np.complex128)
    return [[scalar_to_json(z) for z in row] for row in m]


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{where}: expected a non-empty array of rows")
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise SchemaError(f"{where}: row {i} must be a non-empty array")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(
                f"{where}: row {i} has {len(row)} entries, expected {width}")
        rows.append([scalar_from_json(z, f"{where}[{i}][{j}]")
                     for j, z in enumerate(row)])
    return np.array(rows, dtype=np.complex128)


def _parse_tolerance(obj, where: str) -> ToleranceConfig:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return ToleranceConfig(eq_tol=float(obj), proj_tol=float(obj), rank_tol=float(obj))
    if isinstance(obj, dict):
        allowed = {"eq_tol", "proj_tol", "rank_tol"}
        unknown = set(obj) - allowed
        if unknown:
            raise SchemaError(f"{where}: unknown tolerance fields {sorted(unknown)}")
        defaults = ToleranceConfig()
        try:
            return ToleranceConfig(
                eq_tol=float(obj.get("eq_tol", defaults.eq_tol)),
                proj_tol=float(obj.get("proj_tol", defaults.proj_tol)),
                rank_tol=float(obj.get("rank_tol", defaults.rank_tol)))
        except ValueError as err:
            raise SchemaError(f"{where}: {err}") from err
    raise SchemaError(f"{where}: expected a number or an object of tolerances")


def _parse_limits(obj, where: str) -> Limits:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    allowed = {"max_elements", "max_word_length"}
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"{where}: unknown limit fields {sorted(unknown)}")
    defaults = Limits()
    try:
        return Limits(max_elements=int(obj.get("max_elements", defaults.max_elements)),
                      max_word_length=int(obj.get("max_word_length", defaults.max_word_length)))
    except ValueError as err:
        raise SchemaError(f"{where}: {err}") from err


@dataclass(frozen=True)
class GeneratorProblem:
    """Parsed generator input file: the generator set plus any overrides."""

    gens: GeneratorSet
    tolerance: ToleranceConfig | None
    limits: Limits | None


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ParseError(
            f"{path}: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from err


@dataclass(frozen=True)
class RawGeneratorFile:
    """Schema-checked generator file before partial isometry validation."""

    dim: int
    named: list
    include_identity: bool
    include_zero: bool
    tolerance: ToleranceConfig | None
    limits: Limits | None


def parse_generator_file(data) -> RawGeneratorFile:
    """Schema check of {dim, tolerance?, generators: [{name, matrix}],
    include_identity?, include_zero?, limits?} without validating that the
    matrices are partial isometries."""
    if not isinstance(data, dict):
        raise SchemaError("top level: expected an object")
    allowed = {"dim", "tolerance", "generators", "include_identity", "include_zero", "limits"}
    unknown = set(data) - allowed
    if unknown:
        raise SchemaError(f"top level: unknown fields {sorted(unknown)}")
    if "dim" not in data or not isinstance(data["dim"], int) or data["dim"] < 1:
        raise SchemaError("dim: expected a positive integer")
    dim = data["dim"]
    tolerance = _parse_tolerance(data["tolerance"], "tolerance") if "tolerance" in data else None
    limits = _parse_limits(data["limits"], "limits") if "limits" in data else None
    raw_gens = data.get("generators", [])
    if not isinstance(raw_gens, list):
        raise SchemaError("generators: expected an array")
    named = []
    for i, item in enumerate(raw_gens):
        where = f"generators[{i}]"
        if not isinstance(item, dict) or "name" not in item or "matrix" not in item:
            raise SchemaError(f"{where}: expected an object with 'name' and 'matrix'")
        if not isinstance(item["name"], str):
            raise SchemaError(f"{where}.name: expected a string")
        mat = matrix_from_json(item["matrix"], f"{where}.matrix")
        if mat.shape != (dim, dim):
            raise SchemaError(f"{where}.matrix: shape {mat.shape}, expected ({dim}, {dim})")
        named.append((item["name"], mat))
    include_identity = data.get("include_identity", True)
    include_zero = data.get("include_zero", False)
    for key, value in (("include_identity", include_identity), ("include_zero", include_zero)):
        if not isinstance(value, bool):
            raise SchemaError(f"{key}: expected a boolean")
    return RawGeneratorFile(dim, named, include_identity, include_zero, tolerance, limits)


def parse_generator_problem(data, cfg: ToleranceConfig | None = None) -> GeneratorProblem:
    """Parse and validate a generator file.  An explicit cfg overrides a
    tolerance given in the file."""
    raw = parse_generator_file(data)
    effective = cfg or raw.tolerance or ToleranceConfig()
    try:
        gens = generator_set(raw.named, dim=raw.dim,
                             include_identity=raw.include_identity,
                             include_zero=raw.include_zero, cfg=effective)
    except ValueError as err:
        raise SchemaError(f"generators: {err}") from err
    return GeneratorProblem(gens, raw.tolerance, raw.limits)


def load_generator_problem(path: str, cfg: ToleranceConfig | None = None) -> GeneratorProblem:
    return parse_generator_problem(load_json(path), cfg)


def generator_problem_to_dict(problem: GeneratorProblem) -> dict:
    gens = problem.gens
    out = {
        "dim": gens.dim,
        "generators": [{"name": name, "matrix": matrix_to_json(mat)}
                       for name, mat in gens.named_generators],
        "include_identity": gens.include_identity,
        "include_zero": gens.include_zero,
    }
    if problem.tolerance is not None:
        t = problem.tolerance
        out["tolerance"] = {"eq_tol": t.eq_tol, "proj_tol": t.proj_tol, "rank_tol": t.rank_tol}
    if problem.limits is not None:
        out["limits"] = {"max_elements": problem.limits.max_elements,
                         "max_word_length": problem.limits.max_word_length}
    return out


def load_table_file(path: str) -> InverseSemigroupTable:
    data = load_json(path)
    if not isinstance(data, dict):
        raise SchemaError("top level: expected an object")
    try:
        return table_from_dict(data)
    except ValueError as err:
        raise SchemaError(str(err)) from err


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False)
