"""File formats and deterministic report serialization.

JSON is canonical; CSV is provided for matrices kept in spreadsheets.
Numbers are written as decimals with 12 significant digits, which makes
save/load round trips byte-stable after the first save.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from .core import (
    BeliefLandscape,
    HypotheticalBeliefMatrix,
    InformationStructure,
    InformationalEnvironment,
    Prior,
    StateBeliefMatrix,
    StructuralError,
)


class ParseError(StructuralError):
    """The file could not be interpreted; the message carries the location."""


def round12(value: float) -> float:
    """Round to 12 significant decimal digits (the serialization precision)."""
    return float(f"{value:.12g}")


def jsonable(value):
    """Recursively convert arrays and numbers into JSON-ready values."""
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return round12(float(value))
    if isinstance(value, (np.integer, int)) or isinstance(value, bool):
        return int(value) if not isinstance(value, bool) else value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def dumps_report(doc: dict) -> str:
    return json.dumps(jsonable(doc), indent=2) + "\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# --------------------------------------------------------------------------
# Document parsing
# --------------------------------------------------------------------------


def _labels(doc: dict, key: str, source: str) -> list[str]:
    values = doc.get(key)
    if not isinstance(values, list) or not values or not all(isinstance(v, str) for v in values):
        raise ParseError(f"{source}: '{key}' must be a non-empty list of strings")
    if len(set(values)) != len(values):
        duplicates = sorted({v for v in values if values.count(v) > 1})
        raise ParseError(f"{source}: duplicate {key} label {duplicates[0]!r}")
    return values


def _matrix(doc: dict, key: str, n_rows: int, n_cols: int, source: str) -> np.ndarray:
    rows = doc.get(key)
    if not isinstance(rows, list) or len(rows) != n_rows:
        got = len(rows) if isinstance(rows, list) else type(rows).__name__
        raise ParseError(f"{source}: '{key}' must have {n_rows} rows, got {got}")
    out = np.empty((n_rows, n_cols))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n_cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ParseError(f"{source}: {key} row {i + 1} must have {n_cols} columns, got {got}")
        for j, cell in enumerate(row):
            if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                raise ParseError(f"{source}: non-numeric cell at {key}[{i + 1}, {j + 1}]")
            out[i, j] = float(cell)
    return out


def _vector(doc: dict, key: str, n: int, source: str) -> np.ndarray:
    values = doc.get(key)
    if not isinstance(values, list) or len(values) != n:
        got = len(values) if isinstance(values, list) else type(values).__name__
        raise ParseError(f"{source}: '{key}' must have {n} entries, got {got}")
    out = np.empty(n)
    for j, cell in enumerate(values):
        if isinstance(cell, bool) or not isinstance(cell, (int, float)):
            raise ParseError(f"{source}: non-numeric cell at {key}[{j + 1}]")
        out[j] = float(cell)
    return out


def landscape_from_doc(doc: dict, source: str = "<input>") -> BeliefLandscape:
    states = _labels(doc, "states", source)
    signals = _labels(doc, "signals", source)
    b = _matrix(doc, "B", len(signals), len(states), source)
    q = _matrix(doc, "Q", len(signals), len(signals), source)
    return BeliefLandscape(
        StateBeliefMatrix(b, state_labels=states, signal_labels=signals),
        HypotheticalBeliefMatrix(q, signal_labels=signals),
    )


def beliefs_and_column_from_doc(
    doc: dict, column_label: str, source: str = "<input>"
) -> tuple[StateBeliefMatrix, np.ndarray]:
    """Beliefs plus one hypothetical column: either Q is n x 1, or pick by label."""
    states = _labels(doc, "states", source)
    signals = _labels(doc, "signals", source)
    b = _matrix(doc, "B", len(signals), len(states), source)
    beliefs = StateBeliefMatrix(b, state_labels=states, signal_labels=signals)
    rows = doc.get("Q")
    n_cols = 0
    if isinstance(rows, list) and rows and isinstance(rows[0], list):
        n_cols = len(rows[0])
    if n_cols == 1:
        q = _matrix(doc, "Q", len(signals), 1, source)
        return beliefs, q[:, 0]
    q = _matrix(doc, "Q", len(signals), len(signals), source)
    if column_label not in signals:
        raise ParseError(f"{source}: no signal labelled {column_label!r}")
    return beliefs, q[:, signals.index(column_label)]


def environment_from_doc(doc: dict, source: str = "<input>") -> InformationalEnvironment:
    states = _labels(doc, "states", source)
    signals = _labels(doc, "signals", source)
    structure = _matrix(doc, "I", len(states), len(signals), source)
    prior = _vector(doc, "prior", len(states), source)
    return InformationalEnvironment(
        InformationStructure(structure, state_labels=states, signal_labels=signals),
        Prior(prior, state_labels=states),
    )


def landscape_to_doc(landscape: BeliefLandscape) -> dict:
    return {
        "states": list(landscape.state_labels),
        "signals": list(landscape.signal_labels),
        "B": jsonable(landscape.B.entries),
        "Q": jsonable(landscape.Q.entries),
    }


def environment_to_doc(env: InformationalEnvironment) -> dict:
    return {
        "states": list(env.state_labels),
        "signals": list(env.signal_labels),
        "prior": jsonable(env.prior.entries),
        "I": jsonable(env.structure.entries),
    }


# --------------------------------------------------------------------------
# Files: JSON everywhere, CSV via paired matrix files
# --------------------------------------------------------------------------


def _partner_path(path: Path, old: str, new: str) -> Path:
    stem = path.stem
    pos = stem.rfind(old)
    if pos < 0:
        raise ParseError(
            f"{path}: cannot derive the companion file; expected {old!r} in the name"
        )
    return path.with_name(stem[:pos] + new + stem[pos + len(old) :] + path.suffix)


def _read_csv_matrix(path: Path) -> tuple[list[str], list[str], np.ndarray]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise ParseError(f"{path}: expected a header row and at least one data row")
    header = rows[0]
    col_labels = [c.strip() for c in header[1:]]
    if not col_labels or any(not c for c in col_labels):
        raise ParseError(f"{path}: header must be a leading blank cell then column labels")
    if len(set(col_labels)) != len(col_labels):
        raise ParseError(f"{path}: duplicate column label in header")
    row_labels = []
    data = np.empty((len(rows) - 1, len(col_labels)))
    for i, row in enumerate(rows[1:]):
        if len(row) != len(col_labels) + 1:
            raise ParseError(
                f"{path}: row {i + 2} has {len(row)} cells, expected {len(col_labels) + 1}"
            )
        row_labels.append(row[0].strip())
        for j, cell in enumerate(row[1:]):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric cell at row {i + 2}, column {j + 2}"
                ) from None
    if len(set(row_labels)) != len(row_labels):
        raise ParseError(f"{path}: duplicate row label")
    return row_labels, col_labels, data


def _write_csv_matrix(path: Path, row_labels, col_labels, matrix: np.ndarray) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([""] + list(col_labels))
        for label, row in zip(row_labels, matrix):
            writer.writerow([label] + [f"{v:.12g}" for v in row])


def read_document(path_or_dash: str) -> tuple[dict, bytes, str]:
    """Read a JSON document from a path or standard input; returns (doc, raw bytes, name)."""
    if path_or_dash == "-":
        raw = sys.stdin.buffer.read()
        name = "<stdin>"
    else:
        try:
            raw = Path(path_or_dash).read_bytes()
        except OSError as exc:
            raise ParseError(f"{path_or_dash}: {exc}") from exc
        name = path_or_dash
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{name}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{name}: expected a JSON object")
    return doc, raw, name


def load_landscape(path_or_dash: str) -> tuple[BeliefLandscape, dict[str, str]]:
    """Load a landscape from JSON ('-' for stdin) or a paired B/Q CSV file."""
    if path_or_dash != "-" and path_or_dash.endswith(".csv"):
        b_path = Path(path_or_dash)
        q_path = _partner_path(b_path, "B", "Q")
        signals, states, b = _read_csv_matrix(b_path)
        q_rows, q_cols, q = _read_csv_matrix(q_path)
        if q_rows != signals or q_cols != signals:
            raise ParseError(f"{q_path}: labels do not match {b_path}")
        landscape = BeliefLandscape(
            StateBeliefMatrix(b, state_labels=states, signal_labels=signals),
            HypotheticalBeliefMatrix(q, signal_labels=signals),
        )
        digests = {
            str(b_path): sha256_hex(b_path.read_bytes()),
            str(q_path): sha256_hex(q_path.read_bytes()),
        }
        return landscape, digests
    doc, raw, name = read_document(path_or_dash)
    return landscape_from_doc(doc, name), {name: sha256_hex(raw)}


def load_environment(path_or_dash: str) -> tuple[InformationalEnvironment, dict[str, str]]:
    """Load an environment from JSON ('-' for stdin) or paired I/prior CSV files."""
    if path_or_dash != "-" and path_or_dash.endswith(".csv"):
        i_path = Path(path_or_dash)
        p_path = _partner_path(i_path, "I", "prior")
        states, signals, structure = _read_csv_matrix(i_path)
        p_rows, p_cols, prior = _read_csv_matrix(p_path)
        if p_cols != states or prior.shape[0] != 1:
            raise ParseError(f"{p_path}: expected one row over the state labels of {i_path}")
        env = InformationalEnvironment(
            InformationStructure(structure, state_labels=states, signal_labels=signals),
            Prior(prior[0], state_labels=states),
        )
        digests = {
            str(i_path): sha256_hex(i_path.read_bytes()),
            str(p_path): sha256_hex(p_path.read_bytes()),
        }
        return env, digests
    doc, raw, name = read_document(path_or_dash)
    return environment_from_doc(doc, name), {name: sha256_hex(raw)}


def save_landscape(landscape: BeliefLandscape, path: str) -> None:
    """Write a landscape as JSON, or as B/Q CSV files when the path ends in .csv."""
    if path.endswith(".csv"):
        b_path = Path(path)
        q_path = _partner_path(b_path, "B", "Q")
        _write_csv_matrix(
            b_path, landscape.signal_labels, landscape.state_labels, landscape.B.entries
        )
        _write_csv_matrix(
            q_path, landscape.signal_labels, landscape.signal_labels, landscape.Q.entries
        )
        return
    Path(path).write_text(dumps_report(landscape_to_doc(landscape)), encoding="utf-8")


def save_environment(env: InformationalEnvironment, path: str) -> None:
    if path.endswith(".csv"):
        i_path = Path(path)
        p_path = _partner_path(i_path, "I", "prior")
        _write_csv_matrix(i_path, env.state_labels, env.signal_labels, env.structure.entries)
        _write_csv_matrix(p_path, ["prior"], env.state_labels, env.prior.entries[None, :])
        return
    Path(path).write_text(dumps_report(environment_to_doc(env)), encoding="utf-8")
