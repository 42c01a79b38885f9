"""Problem-file parsing and report envelopes.

Problem files are JSON objects ``{"data": [...], "weights": [...], "weights_b": [...]}``
(weights optional, default equal) or CSV with a header row naming the
columns ``x[,alpha[,beta]]``.  Function-set files for the Hölder command are
JSON ``{"masses": [...], "functions": [[...], ...], "exponents": [...]}``.

Envelopes serialise with sorted keys and shortest round-trip float repr, so
``dumps(loads(text)) == text`` for anything produced by :func:`dumps`.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Optional, Union

from . import __version__
from .bounds import BoundReport, Method
from .errors import AmgmError
from .holder import HolderReport, SampledFunctionSet
from .means import DataVector, WeightVector
from .sharpness import Direction, SearchResult


class ParseError(AmgmError, ValueError):
    """The input file is not well-formed JSON/CSV or misses required fields."""


@dataclass(frozen=True)
class ProblemFile:
    format: str
    data: tuple[float, ...]
    weights: WeightVector
    second_weights: Optional[WeightVector] = None

    @property
    def digest(self) -> str:
        payload = {"data": self.data, "weights": self.weights.values}
        if self.second_weights is not None:
            payload["weights_b"] = self.second_weights.values
        return content_digest(payload)


def content_digest(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _number_list(value: Any, key: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ParseError(f"'{key}' must be a non-empty array of numbers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"'{key}' contains a non-numeric entry {v!r}")
        if not math.isfinite(v):
            raise ParseError(f"'{key}' contains a non-finite entry")
        out.append(float(v))
    return tuple(out)


def read_text(path: Union[str, Path]) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def _guess_format(path: Union[str, Path], fmt: Optional[str]) -> str:
    if fmt:
        return fmt.lower()
    return "csv" if str(path).lower().endswith(".csv") else "json"


def _build_problem(fmt: str, data, weights, weights_b) -> ProblemFile:
    n = len(data)
    if weights is not None and len(weights) != n:
        raise ParseError(f"'weights' has {len(weights)} entries, data has {n}")
    if weights_b is not None and len(weights_b) != n:
        raise ParseError(f"'weights_b' has {len(weights_b)} entries, data has {n}")
    # value checks (n >= 2, weights summing to one) raise DomainError
    return ProblemFile(
        format=fmt,
        data=data,
        weights=WeightVector(weights) if weights is not None else WeightVector.equal(n),
        second_weights=WeightVector(weights_b) if weights_b is not None else None,
    )


def parse_problem(text: str, fmt: str = "json") -> ProblemFile:
    fmt = fmt.lower()
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "data" not in obj:
            raise ParseError("problem JSON must be an object with a 'data' array")
        data = _number_list(obj["data"], "data")
        weights = _number_list(obj["weights"], "weights") if obj.get("weights") is not None else None
        weights_b = (
            _number_list(obj["weights_b"], "weights_b") if obj.get("weights_b") is not None else None
        )
        return _build_problem("json", data, weights, weights_b)
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if any(cell.strip() for cell in r)]
        if len(rows) < 2:
            raise ParseError("CSV needs a header row and at least one data row")
        header = [h.strip().lower() for h in rows[0]]
        if header not in (["x"], ["x", "alpha"], ["x", "alpha", "beta"]):
            raise ParseError(f"CSV header must be x[,alpha[,beta]], got {','.join(header)}")
        cols: list[list[float]] = [[] for _ in header]
        for lineno, row in enumerate(rows[1:], start=2):
            if len(row) != len(header):
                raise ParseError(f"CSV line {lineno}: expected {len(header)} fields")
            for j, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError as exc:
                    raise ParseError(f"CSV line {lineno}: {cell!r} is not a number") from exc
                if not math.isfinite(v):
                    raise ParseError(f"CSV line {lineno}: non-finite value")
                cols[j].append(v)
        return _build_problem(
            "csv",
            tuple(cols[0]),
            tuple(cols[1]) if len(cols) > 1 else None,
            tuple(cols[2]) if len(cols) > 2 else None,
        )
    raise ParseError(f"unknown format {fmt!r} (expected json or csv)")


def load_problem(path: Union[str, Path], fmt: Optional[str] = None) -> ProblemFile:
    return parse_problem(read_text(path), _guess_format(path, fmt))


def parse_function_set(text: str) -> tuple[SampledFunctionSet, str]:
    """Parse a Hölder input file; returns the set and its content digest."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or not {"masses", "functions", "exponents"} <= obj.keys():
        raise ParseError("function-set JSON needs 'masses', 'functions' and 'exponents'")
    masses = _number_list(obj["masses"], "masses")
    exponents = _number_list(obj["exponents"], "exponents")
    if not isinstance(obj["functions"], list) or not obj["functions"]:
        raise ParseError("'functions' must be a non-empty array of arrays")
    functions = [_number_list(f, "functions") for f in obj["functions"]]
    if len({len(f) for f in functions}) != 1:
        raise ParseError("every function needs the same number of samples")
    digest = content_digest({"masses": masses, "functions": functions, "exponents": exponents})
    return SampledFunctionSet(masses, functions, exponents), digest


def load_function_set(path: Union[str, Path]) -> tuple[SampledFunctionSet, str]:
    return parse_function_set(read_text(path))


# -- envelopes ------------------------------------------------------------------

Report = Union[BoundReport, HolderReport, SearchResult]


@dataclass(frozen=True)
class ReportEnvelope:
    command: str
    inputs_digest: str
    report: Report
    tool_version: str = __version__


def _float_out(v: float) -> Optional[float]:
    return None if math.isnan(v) else v


def _float_in(v: Optional[float]) -> float:
    return float("nan") if v is None else float(v)


def report_to_dict(report: Report) -> dict:
    out: dict[str, Any] = {"type": type(report).__name__}
    for f in fields(report):
        v = getattr(report, f.name)
        if isinstance(v, (Method, Direction)):
            v = v.value
        elif isinstance(v, DataVector):
            v = list(v.entries)
        elif isinstance(v, tuple):
            v = [_float_out(t) for t in v]
        elif isinstance(v, float):
            v = _float_out(v)
        out[f.name] = v
    return out


def report_from_dict(obj: dict) -> Report:
    kind = obj.get("type")
    body = {k: v for k, v in obj.items() if k != "type"}
    if kind == "BoundReport":
        body["method"] = Method(body["method"])
        return BoundReport(**body)
    if kind == "HolderReport":
        body["norms"] = tuple(body["norms"])
        return HolderReport(**body)
    if kind == "SearchResult":
        body["argpoint"] = DataVector(tuple(body["argpoint"]))
        body["direction"] = Direction(body["direction"])
        body["weights"] = tuple(body["weights"])
        body["start_ratios"] = tuple(_float_in(v) for v in body["start_ratios"])
        return SearchResult(**body)
    raise ParseError(f"unknown report type {kind!r}")


def envelope_to_dict(env: ReportEnvelope) -> dict:
    return {
        "command": env.command,
        "inputs_digest": env.inputs_digest,
        "report": report_to_dict(env.report),
        "tool_version": env.tool_version,
    }


def dumps(env: ReportEnvelope) -> str:
    return json.dumps(envelope_to_dict(env), sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads(text: str) -> ReportEnvelope:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid envelope JSON: {exc}") from exc
    try:
        return ReportEnvelope(
            command=obj["command"],
            inputs_digest=obj["inputs_digest"],
            report=report_from_dict(obj["report"]),
            tool_version=obj["tool_version"],
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed envelope: {exc}") from exc
