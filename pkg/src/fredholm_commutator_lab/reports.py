"""JSON and CSV emission of scenario results, and reloading them."""
import csv
import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .errors import ScheduleError
from .operator_spaces import (
    FredholmReport,
    HypothesisReport,
    PolarSplitReport,
    SpectralSplitReport,
    SplitRow,
    TailDiagnostic,
    TraceTable,
    Verdict,
)
from .scenarios import ScenarioResult, SignConvention

logger = logging.getLogger(__name__)

REPORT_KINDS = {
    cls.__name__: cls
    for cls in (
        FredholmReport,
        TailDiagnostic,
        HypothesisReport,
        PolarSplitReport,
        SpectralSplitReport,
        SplitRow,
        TraceTable,
    )
}
_PAIR_FIELDS = ("per_m", "per_window", "invertibility")
EXPLORATORY = "exploratory"


@dataclass
class RunManifest:
    tool_version: str
    scenario: str
    parameters: Dict[str, Any]
    seed: Optional[int]
    started_at: str
    artifacts: List[str] = field(default_factory=list)


# --- ENCODING ---
def to_jsonable(value: Any) -> Any:
    """Plain JSON types; complex numbers become {re, im}, reports carry a "kind" tag."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        out = {"kind": type(value).__name__}
        for f in dataclasses.fields(value):
            out[f.name] = to_jsonable(getattr(value, f.name))
        return out
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def from_jsonable(value: Any) -> Any:
    if isinstance(value, list):
        return [from_jsonable(v) for v in value]
    if not isinstance(value, dict):
        return value
    if set(value) == {"re", "im"}:
        return complex(value["re"], value["im"])
    kind = value.get("kind")
    if kind in REPORT_KINDS:
        decoded = {k: from_jsonable(v) for k, v in value.items() if k != "kind"}
        for name in _PAIR_FIELDS:
            if name in decoded and decoded[name] is not None:
                pairs = [tuple(p) if isinstance(p, list) else p for p in decoded[name]]
                decoded[name] = tuple(pairs) if name == "invertibility" else pairs
        if "verdict" in decoded:
            decoded["verdict"] = Verdict(decoded["verdict"])
        return REPORT_KINDS[kind](**decoded)
    return {k: from_jsonable(v) for k, v in value.items()}


def result_to_dict(result: ScenarioResult) -> Dict[str, Any]:
    return {
        "name": result.name,
        "parameters": to_jsonable(result.parameters),
        "seed": result.seed,
        "rng": result.rng,
        "expected": EXPLORATORY if result.expected is None else to_jsonable(result.expected),
        "computed": to_jsonable(result.computed),
        "deviation": result.deviation,
        "tolerance": result.tolerance,
        "converged": result.converged,
        "passed": result.passed,
        "sign_convention": None
        if result.sign_convention is None
        else {
            "commutator_sign": result.sign_convention.commutator_sign,
            "momentum_sign": result.sign_convention.momentum_sign,
        },
        "details": to_jsonable(result.details),
        "flags": list(result.flags),
        "reports": to_jsonable(result.reports),
        "runtime_ms": result.runtime_ms,
    }


def result_from_dict(data: Dict[str, Any]) -> ScenarioResult:
    expected = data["expected"]
    convention = data.get("sign_convention")
    return ScenarioResult(
        name=data["name"],
        parameters=from_jsonable(data["parameters"]),
        expected=None if expected == EXPLORATORY else from_jsonable(expected),
        computed=from_jsonable(data["computed"]),
        deviation=data["deviation"],
        tolerance=data["tolerance"],
        converged=data["converged"],
        reports=from_jsonable(data["reports"]),
        runtime_ms=data["runtime_ms"],
        seed=data.get("seed"),
        sign_convention=None if convention is None else SignConvention(**convention),
        details=from_jsonable(data.get("details", {})),
        flags=list(data.get("flags", [])),
        rng=data.get("rng"),
    )


# --- FILES ---
def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_json(data: Any, path: str):
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")


def emit_json(result: ScenarioResult, path: str):
    write_json(result_to_dict(result), path)
    logger.debug("wrote %s", path)


def load_result(path: str) -> ScenarioResult:
    with open(path, "r", encoding="utf-8") as f:
        return result_from_dict(json.load(f))


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _table_rows(report) -> Tuple[List[str], List[List[str]]]:
    if isinstance(report, FredholmReport):
        header = ["m", "det_re", "det_im", "abs_det"]
        rows = [[str(m), _g(v.real), _g(v.imag), _g(abs(v))] for m, v in report.per_m]
        entries = report.per_m
    elif isinstance(report, TailDiagnostic):
        header = ["m", "partial_sum"]
        rows = [[str(m), _g(s)] for m, s in report.per_m]
        entries = report.per_m
    elif isinstance(report, TraceTable):
        header = ["window_dim", "trace_re", "trace_im"]
        rows = [[str(m), _g(t.real), _g(t.imag)] for m, t in report.per_window]
        entries = report.per_window
    else:
        raise TypeError(f"no CSV layout for {type(report).__name__}")
    if not entries:
        raise ScheduleError(f"{report.label}: empty schedule, nothing to emit")
    return header, rows


def emit_csv(report, path: str):
    """Determinant, tail or trace table as UTF-8 CSV with LF endings and 17 significant digits."""
    header, rows = _table_rows(report)
    _ensure_parent(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def tables(report, prefix: str = "") -> Iterator[Tuple[str, Any]]:
    """Every CSV-able table inside a report, with a file-name stem for each."""
    if isinstance(report, (FredholmReport, TailDiagnostic, TraceTable)):
        yield prefix, report
    elif isinstance(report, HypothesisReport):
        for i, diag in enumerate(report.products.values()):
            yield from tables(diag, f"{prefix}product{i}")
    elif isinstance(report, PolarSplitReport):
        yield f"{prefix}total", report.total
        yield f"{prefix}modulus", report.modulus_factor
        yield f"{prefix}phase", report.phase_factor
    elif isinstance(report, SpectralSplitReport):
        yield f"{prefix}unsplit", report.unsplit


def emit_artifacts(result: ScenarioResult, out_dir: str, stem: str) -> List[str]:
    """JSON result plus one CSV per table; returns the written paths."""
    paths = [os.path.join(out_dir, f"{stem}.json")]
    emit_json(result, paths[0])
    for i, report in enumerate(result.reports):
        for suffix, table in tables(report, f"{i}-"):
            kind = type(table).__name__.lower()
            path = os.path.join(out_dir, f"{stem}.{suffix.rstrip('-')}.{kind}.csv")
            emit_csv(table, path)
            paths.append(path)
    return paths


def write_manifest(manifest: RunManifest, path: str):
    write_json(to_jsonable(manifest), path)
