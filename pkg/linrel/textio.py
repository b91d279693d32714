"""
Text formats: matrices, forms, relations, subspaces, experiment configs,
reports and relation paths

Matrix files:
    rows cols real|complex
    one line per row, entries separated by whitespace, complex entries re,im
Forms append a `kind=<kind>` trailer; relation files start with `nx ny`.
Floats are written with repr so files round-trip exactly.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import numpy as np
from pydantic import ValidationError

from linrel.config import DEFAULT_TOL, ExperimentConfig
from linrel.exceptions import FormatError, InvalidMatrix
from linrel.forms import Form
from linrel.models import PathReport, ReportModel
from linrel.relations import Relation
from linrel.subspace import Subspace, span
from linrel.utils import check_field

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _content_lines(text: str) -> List[str]:
    return [line.strip() for line in text.splitlines() if line.strip()]


def _parse_entry(token: str, field: str) -> complex:
    parts = token.split(",")
    try:
        if len(parts) == 1:
            return float(parts[0]) if field == "real" else complex(float(parts[0]), 0.0)
        if len(parts) == 2 and field == "complex":
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InvalidMatrix(f"cannot parse entry '{token}' for a {field} matrix")


def _parse_matrix_lines(lines: List[str]) -> Tuple[np.ndarray, str, List[str]]:
    """Matrix from the head of lines; returns the unconsumed tail"""
    if not lines:
        raise FormatError("missing matrix header")
    header = lines[0].split()
    if len(header) != 3 or header[2] not in ("real", "complex"):
        raise FormatError(f"bad matrix header '{lines[0]}', expected 'rows cols real|complex'")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(f"bad matrix dimensions in '{lines[0]}'")
    if rows < 0 or cols < 0:
        raise FormatError("matrix dimensions must be nonnegative")
    field = header[2]
    body = lines[1:1 + rows] if cols else []
    if cols and len(body) != rows:
        raise InvalidMatrix(f"expected {rows} rows, found {len(body)}")
    data = np.zeros((rows, cols), dtype=np.float64 if field == "real" else np.complex128)
    for i, line in enumerate(body):
        tokens = line.split()
        if len(tokens) != cols:
            raise InvalidMatrix(f"row {i + 1} has {len(tokens)} entries, expected {cols}")
        data[i] = [_parse_entry(t, field) for t in tokens]
    if not np.all(np.isfinite(data)):
        raise InvalidMatrix("non-finite entries")
    return data, field, lines[1 + len(body):]


def parse_matrix(text: str) -> Tuple[np.ndarray, str]:
    data, field, rest = _parse_matrix_lines(_content_lines(text))
    if rest:
        raise FormatError(f"unexpected trailing line '{rest[0]}'")
    return data, field


def _format_entry(value, field: str) -> str:
    if field == "real":
        return repr(float(np.real(value)))
    return f"{float(np.real(value))!r},{float(np.imag(value))!r}"


def emit_matrix(matrix: np.ndarray, field: str = None) -> str:
    matrix = np.atleast_2d(matrix)
    field = field or ("complex" if np.iscomplexobj(matrix) else "real")
    check_field(field)
    rows, cols = matrix.shape
    lines = [f"{rows} {cols} {field}"]
    for row in matrix:
        lines.append(" ".join(_format_entry(v, field) for v in row))
    return "\n".join(lines) + "\n"


def parse_form(text: str, tol: float = DEFAULT_TOL) -> Form:
    lines = _content_lines(text)
    kind = "general"
    if lines and lines[-1].startswith("kind="):
        kind = lines.pop()[len("kind="):].strip()
    data, field, rest = _parse_matrix_lines(lines)
    if rest:
        raise FormatError(f"unexpected line '{rest[0]}' before the kind trailer")
    return Form(data, field, kind, tol)


def emit_form(form: Form) -> str:
    return emit_matrix(form.matrix, form.field) + f"kind={form.kind}\n"


def parse_relation(text: str, tol: float = DEFAULT_TOL) -> Relation:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty relation file")
    header = lines[0].split()
    try:
        n_x, n_y = (int(v) for v in header)
    except ValueError:
        raise FormatError(f"bad relation header '{lines[0]}', expected 'nx ny'")
    data, field, rest = _parse_matrix_lines(lines[1:])
    if rest:
        raise FormatError(f"unexpected trailing line '{rest[0]}'")
    if data.shape[0] != n_x + n_y:
        raise FormatError(f"spanning set has {data.shape[0]} rows, header says {n_x} + {n_y}")
    if data.shape[1] == 0:
        return Relation(Subspace.zero(n_x + n_y, field, tol), n_x, n_y)
    return Relation.from_spanning(data, n_x, n_y, field, tol)


def emit_relation(relation: Relation) -> str:
    return f"{relation.n_x} {relation.n_y}\n" + emit_matrix(relation.graph.basis, relation.field)


def parse_subspace(text: str, tol: float = DEFAULT_TOL) -> Subspace:
    """A subspace file is a matrix whose columns span it"""
    data, field = parse_matrix(text)
    if data.shape[1] == 0:
        return Subspace.zero(data.shape[0], field, tol)
    return span(data, field, tol)


def emit_subspace(subspace: Subspace) -> str:
    return emit_matrix(subspace.basis, subspace.field)


def parse_config(text: str) -> ExperimentConfig:
    """`key = value` lines with `#` comments into an ExperimentConfig"""
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in ExperimentConfig.model_fields:
            raise FormatError(f"line {number}: unknown key '{key}'")
        if key == "suites":
            values[key] = [s.strip() for s in value.split(",") if s.strip()]
        else:
            values[key] = value
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        raise FormatError(f"invalid experiment config: {e}")


def format_value(value) -> str:
    """Report value: fixed 12 decimals for moderate floats, 12 significant digits otherwise"""
    if value is None:
        return "none"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, complex):
        if value.imag == 0:
            return format_value(value.real)
        return f"{format_value(value.real)},{format_value(value.imag)}"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v == 0.0:
            return f"{0.0:.12f}"
        if 1e-3 <= abs(v) < 1e3:
            return f"{v:.12f}"
        return f"{v:.11e}"
    return str(value)


def format_report(items: Iterable[Tuple[str, object]]) -> str:
    return "".join(f"{key} = {format_value(value)}\n" for key, value in items)


def emit_report(report: ReportModel, prefix: str = "") -> str:
    return format_report((f"{prefix}{k}", v) for k, v in report.report_items())


def write_path(directory: PathLike, path: List[Relation], report: PathReport) -> Path:
    """One relation file per sample plus an index manifest"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = [("steps", report.steps), ("parity", report.parity)]
    for i, relation in enumerate(path):
        name = f"step_{i:03d}.rel"
        (directory / name).write_text(emit_relation(relation))
        entries.append((f"step.{i:03d}", name))
    manifest = directory / "index.txt"
    manifest.write_text("".join(f"{k} = {v}\n" for k, v in entries))
    logger.debug(f"wrote {len(path)} relations to {directory}")
    return manifest


def read_path(directory: PathLike, tol: float = DEFAULT_TOL) -> List[Relation]:
    directory = Path(directory)
    manifest = directory / "index.txt"
    if not manifest.exists():
        raise FormatError(f"missing index manifest in {directory}")
    relations = []
    for line in _content_lines(manifest.read_text()):
        key, _, value = (part.strip() for part in line.partition("="))
        if key.startswith("step."):
            relations.append(parse_relation((directory / value).read_text(), tol))
    return relations
