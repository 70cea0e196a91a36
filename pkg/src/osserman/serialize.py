"""File formats and structured documents.

Tensor and Clifford-system files are JSON documents whose floating-point
numbers are emitted with 17 significant digits, which round-trips float64
exactly.  Loaders validate by default and reject defective data.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .clifford import CliffordSystem, validate_clifford
from .curvature import CurvatureTensor, validate_tensor
from .errors import InvalidSystem, InvalidTensor, ShapeMismatch
from .verify import OssermanReport

SCHEMA_VERSION = 1


def _emit(obj) -> str:
    """JSON text with floats printed to 17 significant digits."""
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_emit(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    return json.dumps(obj)


def dumps_document(doc: dict) -> str:
    return _emit(doc)


def write_document(doc: dict, path) -> None:
    Path(path).write_text(_emit(doc) + "\n")


def tensor_document(r: CurvatureTensor) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "curvature_tensor",
        "n": r.n,
        "comps": [float(v) for v in r.comps.ravel()],
    }


def save_tensor(r: CurvatureTensor, path) -> None:
    write_document(tensor_document(r), path)


def load_tensor(path, validate: bool = True) -> CurvatureTensor:
    doc = json.loads(Path(path).read_text())
    if doc.get("kind") != "curvature_tensor":
        raise ShapeMismatch(f"{path}: not a curvature tensor document")
    n = int(doc["n"])
    comps = np.asarray(doc["comps"], dtype=float)
    if comps.size != n**4:
        raise ShapeMismatch(
            f"{path}: expected {n**4} components for n = {n}, found {comps.size}"
        )
    tensor = CurvatureTensor(comps.reshape(n, n, n, n))
    if validate:
        report = validate_tensor(tensor)
        if not report.passed:
            raise InvalidTensor(
                f"{path}: symmetry validation failed "
                f"(max residual {report.max_residual:.3e})"
            )
    return tensor


def system_document(c: CliffordSystem) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "clifford_system",
        "n": c.n,
        "nu": c.nu,
        "lambda0": c.lambda0,
        "mu": [float(v) for v in c.mu],
        "J": [[float(v) for v in j.ravel()] for j in c.j],
    }


def save_system(c: CliffordSystem, path) -> None:
    write_document(system_document(c), path)


def load_system(path, validate: bool = True) -> CliffordSystem:
    doc = json.loads(Path(path).read_text())
    if doc.get("kind") != "clifford_system":
        raise ShapeMismatch(f"{path}: not a clifford system document")
    n = int(doc["n"])
    mu = np.asarray(doc["mu"], dtype=float)
    j = np.asarray(doc["J"], dtype=float)
    j = j.reshape(mu.size, n, n) if mu.size else np.zeros((0, n, n))
    system = CliffordSystem(n, float(doc["lambda0"]), mu, j)
    if validate:
        report = validate_clifford(system)
        if not report.passed:
            raise InvalidSystem(
                f"{path}: generator validation failed {dict(report.residuals)}"
            )
    return system


def report_document(report: OssermanReport) -> dict:
    """Key/value mirror of the report, field names as in OssermanReport."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "osserman_report",
        "is_osserman": report.is_osserman,
        "profile": [[v, m] for v, m in report.profile.pairs],
        "max_deviation": report.max_deviation,
        "samples_used": report.samples_used,
        "m0": report.m0,
        "nu": report.nu,
        "prop1_hypotheses": list(report.prop1_hypotheses),
        "radon_bound_ok": report.radon_bound_ok,
        "prop2_class": report.prop2_class.value,
    }


def trace_document(trace) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "recovery_trace",
        "stages": [{"name": s.name, "info": s.info} for s in trace],
    }
