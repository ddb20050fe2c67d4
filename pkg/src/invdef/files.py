"""Problem and result files (UTF-8 JSON).

A problem file describes the ring (variables with G_m-weights), the group
data (finite part, torus rows, Lie basis / dual basis derivation pairs),
the ideal, the covariant counts (multiplicity, Hilbert value) of the
generator module, optional invariant-ring generators, and options.  Matrix
entries are rational strings ("2/3") or numbers.

A result file stores the universal deformation: the deformation variables
with their weights, the base ideal K, the equation and relation matrices
U and V in canonical printed form, and the stop order.  Result files are
byte-stable across runs and reloadable for independent verification.
"""

from __future__ import annotations

import json
from typing import List, Optional, Tuple

from .action import GroupAction
from .deform import ProblemSpec, SpecValidationError, UniversalDeformation
from .matrix import PolyMatrix
from .ring import (
    Polynomial,
    PolyParseError,
    VariableSet,
    poly_parse,
    poly_print,
    tensor_vars,
)


def _parse_ring(doc: dict) -> VariableSet:
    ring = doc.get("ring")
    if not ring or "variables" not in ring or "gm_weights" not in ring:
        raise SpecValidationError("problem file needs ring.variables and ring.gm_weights")
    return VariableSet(ring["variables"], ring["gm_weights"])


def load_problem(path: str) -> ProblemSpec:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return problem_from_dict(doc)


def problem_from_dict(doc: dict) -> ProblemSpec:
    vars = _parse_ring(doc)
    group = doc.get("group", {})
    lie_basis = group.get("lie_basis") or []
    lie_dual = group.get("lie_dual_basis") or []
    if len(lie_basis) != len(lie_dual):
        raise SpecValidationError("lie_basis and lie_dual_basis lengths differ")
    try:
        action = GroupAction(
            vars,
            finite_part=group.get("finite_part"),
            torus_part=group.get("torus_part"),
            connected_part=list(zip(lie_basis, lie_dual)),
            krylov_cap=int(doc.get("options", {}).get("krylov_cap", 64)),
        )
    except ValueError as exc:
        raise SpecValidationError(f"group data invalid: {exc}") from exc
    try:
        ideal = [poly_parse(s, vars) for s in doc.get("ideal", [])]
        invariants = [poly_parse(s, vars) for s in doc.get("invariants", [])]
    except PolyParseError as exc:
        raise SpecValidationError(f"polynomial parse error: {exc}") from exc
    decomposition = []
    for entry in doc.get("n1_decomposition", []):
        if isinstance(entry, dict):
            item = (int(entry["multiplicity"]), int(entry["hilbert_value"]))
            if "dimension" in entry:
                item = item + (int(entry["dimension"]),)
        else:
            item = tuple(int(x) for x in entry)
        decomposition.append(item)
    options = doc.get("options", {})
    spec = ProblemSpec(
        vars,
        action,
        ideal,
        decomposition,
        invariants=invariants,
        max_order=options.get("max_order"),
        max_covariant_degree=int(options.get("max_covariant_degree", 16)),
        positive_weight_only=bool(options.get("positive_weight_only", False)),
        name=doc.get("name", "problem"),
    )
    spec.psg_columns = doc.get("psg_columns")
    spec.limit_targets = doc.get("limit_targets", {})
    return spec


def save_result(
    path: str, result: UniversalDeformation, spec: ProblemSpec, log_lines: List[str]
) -> None:
    doc = result_to_dict(result, spec, log_lines)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def result_to_dict(
    result: UniversalDeformation, spec: ProblemSpec, log_lines: List[str]
) -> dict:
    return {
        "problem": spec.name,
        "t_variables": list(result.t_ring.names),
        "t_weights": list(result.t_ring.gm_weights),
        "K": [poly_print(g) for g in result.K],
        "U": [[poly_print(e) for e in row] for row in result.U.entries],
        "V": [[poly_print(e) for e in row] for row in result.V.entries],
        "stop_order": result.stop_order,
        "stopped": result.stopped,
        "log": list(log_lines),
    }


def load_result(path: str, spec: ProblemSpec) -> UniversalDeformation:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    t_ring = VariableSet(doc["t_variables"], doc["t_weights"])
    cr = tensor_vars(spec.vars, t_ring)
    try:
        K = [poly_parse(s, t_ring) for s in doc["K"]]
        U = PolyMatrix(cr, [[poly_parse(s, cr) for s in row] for row in doc["U"]])
        V_rows = [[poly_parse(s, cr) for s in row] for row in doc["V"]]
    except PolyParseError as exc:
        raise SpecValidationError(f"result file parse error: {exc}") from exc
    if V_rows and V_rows[0]:
        V = PolyMatrix(cr, V_rows)
    else:
        V = PolyMatrix(cr, [[] for _ in range(U.cols)])
    return UniversalDeformation(
        t_ring, K, U, V, int(doc["stop_order"]), bool(doc["stopped"]), doc["t_weights"]
    )


def load_ideal_file(path: str) -> Tuple[VariableSet, List[Polynomial], Optional[List[int]]]:
    """Ideal-only file for `analyze`: ring plus generator strings."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    vars = _parse_ring(doc)
    gens = [poly_parse(s, vars) for s in doc.get("ideal", [])]
    weights = doc.get("weights")
    return vars, gens, weights
