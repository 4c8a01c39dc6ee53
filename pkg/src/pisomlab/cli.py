"""Batch front door: load a generator (or table) file, run one analysis stage
or the whole pipeline, and emit a certificate as JSON or text.

Exit codes: 0 = analysis completed (whatever the verdict), 2 = input error,
3 = internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .invsg import barnes_representation, validate_table
from .jsonio import (
    GeneratorProblem,
    ParseError,
    SchemaError,
    dump_report,
    load_generator_problem,
    load_table_file,
)
from .numlin import DEFAULT_TOL, InvariantViolation, PisomError, ToleranceConfig
from .pisom import NotPartialIsometry, make_partial_isometry, partial_isometry_defect
from .projlat import boolean_atoms, decompose_by_atoms, multiplicity_profile
from .sgroup import (
    CLOSED,
    FAILURE,
    TRUNCATED,
    DEFAULT_LIMITS,
    Limits,
    brandt_structure,
    close,
    family_projections,
    check_pq_contained,
    check_pq_equal,
    generator_set,
    is_irreducible,
    selfadjoint_closure,
    word_label,
)

COMMANDS = ("check", "closure", "extend", "atoms", "multiplicity",
            "decompose", "brandt", "barnes", "report")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


@dataclass(frozen=True)
class AnalysisRequest:
    command: str
    input_path: str
    tolerance: ToleranceConfig | None = None
    limits: Limits | None = None
    output_format: str = "text"
    seed: int = 0


@dataclass(frozen=True)
class Certificate:
    verdict: str                       # Extendable | NotExtendable | Inconclusive
    witness_word: tuple[str, ...] | None
    deviation: float | None
    limit_hit: str | None
    provenance: dict

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict}
        if self.witness_word is not None:
            out["witness_word"] = list(self.witness_word)
        if self.deviation is not None:
            out["deviation"] = self.deviation
        if self.limit_hit is not None:
            out["limit_hit"] = self.limit_hit
        out["provenance"] = self.provenance
        return out


def _provenance(cfg: ToleranceConfig, limits: Limits, seed: int) -> dict:
    return {
        "tool": f"pisomlab {__version__}",
        "tolerances": {"eq_tol": cfg.eq_tol, "proj_tol": cfg.proj_tol,
                       "rank_tol": cfg.rank_tol},
        "limits": {"max_elements": limits.max_elements,
                   "max_word_length": limits.max_word_length},
        "seed": seed,
    }


def _verdict_from_closure(result) -> Certificate:
    if result.status == FAILURE:
        return Certificate("NotExtendable", result.witness_word,
                           result.witness_deviation, None, {})
    if result.status == TRUNCATED:
        return Certificate("Inconclusive", None, None, result.limit_hit, {})
    return Certificate("Extendable", None, None, None, {})


def _effective(problem: GeneratorProblem, request: AnalysisRequest):
    cfg = request.tolerance or problem.tolerance or DEFAULT_TOL
    limits = request.limits or problem.limits or DEFAULT_LIMITS
    return cfg, limits


def _closure_summary(result) -> dict:
    out = {"status": result.status, "element_count": len(result.elements)}
    if result.status == FAILURE:
        out["witness_word"] = list(result.witness_word)
        out["deviation"] = result.witness_deviation
    if result.status == TRUNCATED:
        out["limit_hit"] = result.limit_hit
    return out


def _atoms_from_closure(result, cfg):
    fams = family_projections(result, cfg)
    if not fams.q_set.is_commuting(cfg):
        return fams, None
    return fams, boolean_atoms(fams.q_set, cfg)


def cmd_check(request: AnalysisRequest) -> dict:
    """Per-generator validation report; invalid generators are results here,
    not input errors."""
    from .jsonio import load_json, parse_generator_file

    raw = parse_generator_file(load_json(request.input_path))
    cfg = request.tolerance or raw.tolerance or DEFAULT_TOL
    rows = []
    all_valid = True
    for name, mat in raw.named:
        row = {"name": name, "deviation": partial_isometry_defect(mat, cfg)}
        try:
            pi = make_partial_isometry(mat, cfg)
            row["valid"] = True
            row["initial_rank"] = int(round(float(np.trace(pi.initial).real)))
            row["final_rank"] = int(round(float(np.trace(pi.final).real)))
        except NotPartialIsometry:
            row["valid"] = False
            all_valid = False
        rows.append(row)
    return {"command": "check", "dim": raw.dim, "all_valid": all_valid,
            "generators": rows}


def cmd_closure(problem, request) -> dict:
    cfg, limits = _effective(problem, request)
    result = close(problem.gens, limits, monitor_pi=True, cfg=cfg)
    out = {"command": "closure", **_closure_summary(result)}
    if result.status != FAILURE:
        out["words"] = [word_label(e.word) for e in result.elements[:50]]
    return out


def cmd_extend(problem, request) -> dict:
    cfg, limits = _effective(problem, request)
    result = selfadjoint_closure(problem.gens, limits, cfg)
    cert = _verdict_from_closure(result)
    cert = Certificate(cert.verdict, cert.witness_word, cert.deviation,
                       cert.limit_hit, _provenance(cfg, limits, request.seed))
    return {"command": "extend", **_closure_summary(result),
            "certificate": cert.to_dict()}


def cmd_atoms(problem, request) -> dict:
    cfg, limits = _effective(problem, request)
    result = close(problem.gens, limits, monitor_pi=True, cfg=cfg)
    if result.status == FAILURE:
        return {"command": "atoms", **_closure_summary(result), "atoms": None}
    fams, atoms = _atoms_from_closure(result, cfg)
    out = {"command": "atoms", **_closure_summary(result),
           "q_commuting": fams.q_set.is_commuting(cfg)}
    out["atoms"] = atoms.to_json_dict() if atoms is not None else None
    return out


def cmd_multiplicity(problem, request) -> dict:
    cfg, limits = _effective(problem, request)
    result = close(problem.gens, limits, monitor_pi=True, cfg=cfg)
    if result.status == FAILURE:
        return {"command": "multiplicity", **_closure_summary(result), "atoms": None}
    fams, atoms = _atoms_from_closure(result, cfg)
    out = {"command": "multiplicity", **_closure_summary(result),
           "q_commuting": fams.q_set.is_commuting(cfg), "atoms": None}
    if atoms is not None:
        profile = multiplicity_profile(atoms)
        out["atoms"] = {"ranks": list(atoms.ranks), "uniform": profile.uniform}
        if profile.uniform:
            out["atoms"]["multiplicity"] = profile.multiplicity
        out["counts"] = {str(k): v for k, v in sorted(profile.counts.items())}
    return out


def cmd_decompose(problem, request) -> dict:
    from .projlat import OffDiagonalResidual

    cfg, limits = _effective(problem, request)
    result = close(problem.gens, limits, monitor_pi=True, cfg=cfg)
    if result.status == FAILURE:
        return {"command": "decompose", **_closure_summary(result), "operators": None}
    fams, atoms = _atoms_from_closure(result, cfg)
    out = {"command": "decompose", **_closure_summary(result),
           "q_commuting": fams.q_set.is_commuting(cfg), "operators": None}
    if atoms is None:
        return out
    rows = []
    for name, mat in problem.gens.named_generators:
        try:
            blocks = decompose_by_atoms(mat, atoms, cfg)
            rows.append({"name": name, "decomposable": True,
                         "block_dims": [b.shape[0] for b in blocks]})
        except OffDiagonalResidual as err:
            rows.append({"name": name, "decomposable": False,
                         "worst_pair": list(err.worst_pair),
                         "residual": err.residual})
    out["operators"] = rows
    out["atom_ranks"] = list(atoms.ranks)
    return out


def cmd_brandt(problem, request) -> dict:
    cfg, limits = _effective(problem, request)
    result = close(problem.gens, limits, monitor_pi=True, cfg=cfg)
    out = {"command": "brandt", **_closure_summary(result), "brandt": None}
    if result.status == FAILURE:
        return out
    try:
        structure = brandt_structure(result, cfg)
        out["brandt"] = {"family_ranks": list(structure.family_ranks),
                         "checks": structure.checks}
    except PisomError as err:
        out["brandt_error"] = {"kind": type(err).__name__, "message": str(err)}
    return out


def cmd_barnes(request: AnalysisRequest) -> dict:
    table = load_table_file(request.input_path)
    violations = validate_table(table)
    out = {"command": "barnes", "n": table.n,
           "valid": not violations,
           "violations": [str(v) for v in violations[:20]]}
    if violations:
        return out
    cfg = request.tolerance or DEFAULT_TOL
    limits = request.limits or DEFAULT_LIMITS
    images = barnes_representation(table, cfg)
    distinct = len({tuple(np.asarray(pi.matrix).ravel().round(9).tolist())
                    for pi in images})
    named = [(table.name_of(i).replace("*", "'") or f"s{i}", pi.matrix)
             for i, pi in enumerate(images)]
    gens = generator_set(named, dim=table.n, include_identity=True, cfg=cfg)
    closure = selfadjoint_closure(gens, limits, cfg)
    out.update({
        "injective": distinct == table.n,
        "all_partial_isometries": True,
        "closure_status": closure.status,
        "closure_elements": len(closure.elements),
    })
    return out


def cmd_report(problem, request) -> dict:
    cfg, limits = _effective(problem, request)
    base = close(problem.gens, limits, monitor_pi=True, cfg=cfg)
    report: dict = {"command": "report", "dim": problem.gens.dim}
    irred = is_irreducible(problem.gens, cfg, seed=request.seed)
    report["irreducible"] = irred.irreducible
    report["span_dim"] = irred.span_dim

    if base.status == FAILURE:
        # the base semigroup itself produced a non partial isometry
        report.update({"status": FAILURE, "element_count": len(base.elements),
                       "witness_word": list(base.witness_word),
                       "deviation": base.witness_deviation,
                       "q_commuting": None, "pq_equal": None,
                       "pq_contained": None, "atoms": None, "brandt": None})
        cert = Certificate("NotExtendable", base.witness_word, base.witness_deviation,
                           None, _provenance(cfg, limits, request.seed))
        report["certificate"] = cert.to_dict()
        return report

    fams, atoms = _atoms_from_closure(base, cfg)
    report["base_closure"] = _closure_summary(base)
    report["q_commuting"] = fams.q_set.is_commuting(cfg)
    report["pq_equal"] = check_pq_equal(base, cfg)
    report["pq_contained"] = check_pq_contained(base, cfg)
    if atoms is not None:
        profile = multiplicity_profile(atoms)
        report["atoms"] = {"ranks": list(atoms.ranks), "uniform": profile.uniform}
        if profile.uniform:
            report["atoms"]["multiplicity"] = profile.multiplicity
    else:
        report["atoms"] = None

    extended = selfadjoint_closure(problem.gens, limits, cfg)
    report["status"] = extended.status
    report["element_count"] = len(extended.elements)
    if extended.status == FAILURE:
        report["witness_word"] = list(extended.witness_word)
        report["deviation"] = extended.witness_deviation

    report["brandt"] = None
    if extended.status != FAILURE and base.status == CLOSED:
        try:
            structure = brandt_structure(base, cfg)
            report["brandt"] = {"family_ranks": list(structure.family_ranks)}
        except PisomError:
            pass

    cert = _verdict_from_closure(extended)
    cert = Certificate(cert.verdict, cert.witness_word, cert.deviation,
                       cert.limit_hit, _provenance(cfg, limits, request.seed))
    report["certificate"] = cert.to_dict()
    return report


def run(request: AnalysisRequest) -> tuple[int, dict]:
    """Run one analysis request; returns (exit_code, report dict)."""
    if request.command not in COMMANDS:
        raise SchemaError(f"unknown command {request.command!r}")
    if request.command == "barnes":
        return EXIT_OK, cmd_barnes(request)
    if request.command == "check":
        return EXIT_OK, cmd_check(request)
    problem = load_generator_problem(request.input_path, request.tolerance)
    handler = {
        "closure": cmd_closure,
        "extend": cmd_extend,
        "atoms": cmd_atoms,
        "multiplicity": cmd_multiplicity,
        "decompose": cmd_decompose,
        "brandt": cmd_brandt,
        "report": cmd_report,
    }[request.command]
    return EXIT_OK, handler(problem, request)


def _render_text(report: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_render_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.append(f"{pad}  -")
                lines.append(_render_text(item, indent + 2))
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pisomlab",
        description="Analyze semigroups of partial isometries at finite dimension.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", help="JSON input file (generators, or a table for 'barnes')")
    parser.add_argument("--tol", type=float, default=None,
                        help="override all three tolerances with one value")
    parser.add_argument("--max-elements", type=int, default=None)
    parser.add_argument("--max-word-len", type=int, default=None)
    parser.add_argument("--format", choices=("json", "text"), default="text")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--version", action="version", version=f"pisomlab {__version__}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tolerance = None
    if args.tol is not None:
        try:
            tolerance = ToleranceConfig(args.tol, args.tol, args.tol)
        except ValueError as err:
            print(f"error: {err}", file=sys.stderr)
            return EXIT_INPUT
    limits = None
    if args.max_elements is not None or args.max_word_len is not None:
        defaults = DEFAULT_LIMITS
        try:
            limits = Limits(args.max_elements or defaults.max_elements,
                            args.max_word_len or defaults.max_word_length)
        except ValueError as err:
            print(f"error: {err}", file=sys.stderr)
            return EXIT_INPUT
    request = AnalysisRequest(command=args.command, input_path=args.input,
                              tolerance=tolerance, limits=limits,
                              output_format=args.format, seed=args.seed)
    try:
        code, report = run(request)
    except (ParseError, SchemaError, NotPartialIsometry) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as err:
        print(f"internal invariant violation: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.format == "json":
        print(dump_report(report))
    else:
        print(_render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
