"""
Module contains conversion between library objects and the JSON problem and report files.
"""
from __future__ import annotations

from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import json

import numpy as np
import scipy.sparse as sp

from .aliasing import get_aliased_class, get_aliased_name
from .annotations import get_annotations, get_required_parameters
from .cones import Cone
from .doc import doc_category
from .errors import ProblemFormatError, RenyiConesError
from .solver import ConicProblem, SolveResult, SolverConfig
from .utilities import RNG_ALGORITHM
from .verifier import VerificationReport


__all__ = (
    "SCHEMA_VERSION",
    "convert_cone_to_dict",
    "convert_cone_from_dict",
    "convert_problem_to_dict",
    "convert_problem_from_dict",
    "load_problem",
    "dump_problem",
    "convert_to_jsonable",
    "build_report",
    "dump_report",
)


SCHEMA_VERSION = 1

PROBLEM_KEYS = {"schema", "objective", "A", "b", "cones", "G", "h", "start"}
REQUIRED_PROBLEM_KEYS = {"schema", "objective", "cones"}
TRIPLET_KEYS = {"rows", "cols", "vals"}


# Cones
# ------
@doc_category("Conversion")
def convert_cone_to_dict(cone: Cone) -> dict:
    """
    Converts a cone into its problem file record, e.g.,
    ``{"kind": "renyi-hypo", "n": 2, "alpha": 0.5, "field": "real"}``.
    """
    type_ = type(cone)
    kind = get_aliased_name(type_)
    if kind is None:
        raise TypeError(f"{type_.__name__} has no alias and can't be written into problem files.")

    return {"kind": kind, **{name: getattr(cone, name) for name in get_annotations(type_)}}


def _annotation_name(annotation) -> str:
    return annotation if isinstance(annotation, str) else getattr(annotation, "__name__", str(annotation))


def _check_value(kind: str, name: str, value: Any, annotation) -> Any:
    expected = _annotation_name(annotation)
    if expected == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ProblemFormatError(f"Cone '{kind}': parameter '{name}' must be an integer, got {value!r}.")
    elif expected == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ProblemFormatError(f"Cone '{kind}': parameter '{name}' must be a number, got {value!r}.")
        value = float(value)
    elif not isinstance(value, str):
        raise ProblemFormatError(f"Cone '{kind}': parameter '{name}' must be a string, got {value!r}.")

    return value


@doc_category("Conversion")
def convert_cone_from_dict(record: Mapping[str, Any]) -> Cone:
    """
    Converts a problem file cone record back into a cone.

    Raises
    --------
    ProblemFormatError
        Unknown kind, unknown or missing parameters, wrongly typed values,
        or parameters the cone rejects.
    """
    if not isinstance(record, Mapping) or "kind" not in record:
        raise ProblemFormatError(f"Cone records must be objects with a 'kind' key, got {record!r}.")

    kind = record["kind"]
    type_ = get_aliased_class(kind) if isinstance(kind, str) else None
    if type_ is None:
        raise ProblemFormatError(f"Unknown cone kind {kind!r}.")

    annotations = get_annotations(type_)
    data = {}
    for name, value in record.items():
        if name == "kind":
            continue

        if name not in annotations:
            raise ProblemFormatError(
                f"Parameter '{name}' does not exist in cone '{kind}'.\n"
                f"Allowed parameters: {', '.join(annotations)}."
            )

        data[name] = _check_value(kind, name, value, annotations[name])

    missing = get_required_parameters(type_) - data.keys()
    if missing:
        raise ProblemFormatError(f"Cone '{kind}' is missing parameters: {', '.join(sorted(missing))}.")

    try:
        return type_(**data)
    except ValueError as exc:
        raise ProblemFormatError(f"Invalid cone '{kind}': {exc}") from exc


# Problems
# ---------
def _triplets_to_dict(M: sp.spmatrix) -> dict:
    coo = sp.coo_matrix(M)
    return {"rows": coo.row.tolist(), "cols": coo.col.tolist(), "vals": coo.data.tolist()}


def _triplets_from_dict(name: str, data: Any, shape: Tuple[int, int]) -> sp.csr_matrix:
    if not isinstance(data, Mapping) or set(data) != TRIPLET_KEYS:
        raise ProblemFormatError(f"'{name}' must be an object with exactly the keys rows, cols and vals.")

    rows, cols = (_vector(f"{name}.{key}", data[key], integer=True) for key in ("rows", "cols"))
    vals = _vector(f"{name}.vals", data["vals"])
    if not rows.size == cols.size == vals.size:
        raise ProblemFormatError(f"'{name}' triplet arrays differ in length.")

    if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= shape[0] or cols.max() >= shape[1]):
        raise ProblemFormatError(f"'{name}' has indices outside its {shape[0]}x{shape[1]} shape.")

    return sp.csr_matrix((vals, (rows, cols)), shape=shape)


def _vector(name: str, data: Any, integer: bool = False) -> np.ndarray:
    if not isinstance(data, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in data):
        raise ProblemFormatError(f"'{name}' must be an array of numbers.")

    if integer:
        if any(not isinstance(v, int) for v in data):
            raise ProblemFormatError(f"'{name}' must be an array of integers.")

        return np.asarray(data, dtype=int)

    vector = np.asarray(data, dtype=float)
    if not np.all(np.isfinite(vector)):
        raise ProblemFormatError(f"'{name}' contains non-finite values.")

    return vector


@doc_category("Conversion")
def convert_problem_to_dict(problem: ConicProblem, start: Optional[np.ndarray] = None) -> dict:
    """
    Converts a problem (and optionally a strictly feasible start) into a problem file document.

    ``G`` and ``h`` are only written when they differ from the identity and zero.
    """
    data = {
        "schema": SCHEMA_VERSION,
        "objective": problem.c.tolist(),
        "cones": [convert_cone_to_dict(cone) for cone in problem.cones],
    }
    if problem.b.size:
        data["A"] = _triplets_to_dict(problem.A)
        data["b"] = problem.b.tolist()

    identity = problem.G.shape[0] == problem.G.shape[1] and (problem.G != sp.identity(problem.n_vars)).nnz == 0
    if not identity:
        data["G"] = _triplets_to_dict(problem.G)

    if np.any(problem.h):
        data["h"] = problem.h.tolist()

    if start is not None:
        data["start"] = np.asarray(start, dtype=float).tolist()

    return data


@doc_category("Conversion")
def convert_problem_from_dict(data: Any) -> Tuple[ConicProblem, Optional[np.ndarray]]:
    """
    Converts a problem file document into a problem and its optional start point.

    Raises
    --------
    ProblemFormatError
        Unknown or missing keys, wrong schema version, malformed arrays,
        or a document that doesn't describe a valid problem.
    """
    if not isinstance(data, Mapping):
        raise ProblemFormatError("Problem files must contain a JSON object.")

    unknown = set(data) - PROBLEM_KEYS
    if unknown:
        raise ProblemFormatError(f"Unknown keys: {', '.join(sorted(unknown))}.")

    missing = REQUIRED_PROBLEM_KEYS - set(data)
    if missing:
        raise ProblemFormatError(f"Missing keys: {', '.join(sorted(missing))}.")

    if data["schema"] != SCHEMA_VERSION:
        raise ProblemFormatError(f"Unsupported schema {data['schema']!r}, expected {SCHEMA_VERSION}.")

    if ("A" in data) != ("b" in data):
        raise ProblemFormatError("'A' and 'b' must be given together.")

    objective = _vector("objective", data["objective"])
    if not isinstance(data["cones"], list):
        raise ProblemFormatError("'cones' must be an array of cone records.")

    cones = [convert_cone_from_dict(record) for record in data["cones"]]
    cone_dim = sum(cone.dim for cone in cones)
    n_vars = objective.size

    A = b = G = h = start = None
    if "b" in data:
        b = _vector("b", data["b"])
        A = _triplets_from_dict("A", data["A"], (b.size, n_vars))

    if "G" in data:
        G = _triplets_from_dict("G", data["G"], (cone_dim, n_vars))

    if "h" in data:
        h = _vector("h", data["h"])

    if "start" in data:
        start = _vector("start", data["start"])
        if start.size != n_vars:
            raise ProblemFormatError(f"'start' has length {start.size}, expected {n_vars}.")

    try:
        problem = ConicProblem(objective, cones, A=A, b=b, G=G, h=h)
    except ProblemFormatError:
        raise
    except RenyiConesError as exc:
        raise ProblemFormatError(str(exc)) from exc

    return problem, start


@doc_category("Conversion")
def load_problem(path: Union[str, Path]) -> Tuple[ConicProblem, Optional[np.ndarray]]:
    """
    Reads a problem file.

    Raises
    --------
    OSError
        The file can't be read.
    ProblemFormatError
        Invalid JSON (with its line and column) or invalid content.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"Invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc

    return convert_problem_from_dict(data)


@doc_category("Conversion")
def dump_problem(problem: ConicProblem, path: Union[str, Path], start: Optional[np.ndarray] = None):
    "Writes ``problem`` (and ``start``) into a problem file."
    Path(path).write_text(json.dumps(convert_problem_to_dict(problem, start), indent=2), encoding="utf-8")


# Reports
# --------
@doc_category("Conversion")
def convert_to_jsonable(value: Any) -> Any:
    """
    Recursively converts ``value`` into JSON compatible data.

    Dataclasses become objects, enums their values, real arrays (nested) lists and
    complex arrays ``{"real": ..., "imag": ...}`` objects.
    Non-finite numbers become ``null``, so every number in a report is finite.
    """
    if isinstance(value, Enum):
        return convert_to_jsonable(value.value)

    if isinstance(value, Cone):
        return convert_cone_to_dict(value)

    if is_dataclass(value) and not isinstance(value, type):
        return convert_to_jsonable(asdict(value))

    if isinstance(value, Mapping):
        return {str(k): convert_to_jsonable(v) for k, v in value.items()}

    if isinstance(value, (list, tuple)):
        return [convert_to_jsonable(v) for v in value]

    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return {"real": convert_to_jsonable(value.real), "imag": convert_to_jsonable(value.imag)}

        return convert_to_jsonable(value.tolist())

    if isinstance(value, (bool, np.bool_)):
        return bool(value)

    if isinstance(value, (int, np.integer)):
        return int(value)

    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None

    if isinstance(value, (complex, np.complexfloating)):
        return {"real": convert_to_jsonable(value.real), "imag": convert_to_jsonable(value.imag)}

    return value


def _result_fields(result: SolveResult) -> dict:
    return {
        "status": result.status,
        "objective": result.objective_value,
        "gap_bound": result.gap_bound,
        "iterations": result.iterations,
        "residuals": result.residuals,
        "trace": result.trace,
        "wall_time": result.wall_time,
        "message": result.message,
    }


@doc_category("Conversion")
def build_report(
    command: str,
    status: str,
    seed: Optional[int] = None,
    config: Optional[SolverConfig] = None,
    result: Optional[SolveResult] = None,
    verification: Optional[List[VerificationReport]] = None,
    wall_time: Optional[float] = None,
    **payload,
) -> dict:
    """
    Builds a report file document.

    Parameters
    ------------
    command: str
        The command that produced the report.
    status: str
        Overall status, e.g., ``"optimal"`` or ``"passed"``.
    seed: Optional[int]
        Seed of a randomized command. Written together with the generator algorithm.
    config: Optional[SolverConfig]
        Solver configuration echo.
    result: Optional[SolveResult]
        Solver result, contributing objective, residuals, trace and wall time.
    verification: Optional[List[VerificationReport]]
        Verifier reports.
    wall_time: Optional[float]
        Total wall time in seconds, overriding the solver's.
    payload:
        Command specific values.
    """
    from . import __version__

    report: Dict[str, Any] = {"schema": SCHEMA_VERSION, "command": command, "version": __version__}
    if seed is not None:
        report["seed"] = seed
        report["rng"] = RNG_ALGORITHM

    if config is not None:
        report["config"] = config

    report["status"] = status
    if result is not None:
        report.update(_result_fields(result))

    if verification is not None:
        report["reports"] = verification

    if wall_time is not None:
        report["wall_time"] = wall_time

    report.update(payload)
    return convert_to_jsonable(report)


@doc_category("Conversion")
def dump_report(report: dict) -> str:
    "Serializes a report built by :func:`build_report` into JSON text."
    return json.dumps(report, indent=2, allow_nan=False)
