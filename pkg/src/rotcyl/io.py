"""Curve CSV files and report serialization."""
from __future__ import annotations

import csv
import json
import math

import numpy as np

from .curves import GeneratingParams, PlanarCurve
from .errors import InvariantViolation

CURVE_COLUMNS = ["s", "x1", "x2", "theta", "kappa"]
META_KEYS = ["a", "b", "k", "n", "L", "n_samples", "closure_residual"]


def fmt(x):
    """Round-trip exact decimal text for a float."""
    return format(float(x), ".17g")


def write_curve_csv(path, curve):
    p = curve.params
    meta = {
        "a": fmt(p.a), "b": fmt(p.b), "k": str(p.symmetry_order), "n": str(p.rotation_index),
        "L": fmt(curve.length), "n_samples": str(curve.n_samples),
        "closure_residual": fmt(curve.closure_residual),
    }
    with open(path, "w", newline="") as fh:
        for key in META_KEYS:
            fh.write(f"# {key}={meta[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        s = curve.s
        for i in range(curve.n_samples):
            writer.writerow([fmt(s[i]), fmt(curve.points[i, 0]), fmt(curve.points[i, 1]),
                             fmt(curve.theta[i]), fmt(curve.kappa[i])])


def read_curve_csv(path, config=None, validate=True):
    """Load a curve file; with ``validate`` the curve invariants are enforced."""
    meta = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if not sep:
                raise InvariantViolation("file_format", line, "'# key=value' metadata")
            meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    missing = [k for k in META_KEYS if k not in meta]
    if missing:
        raise InvariantViolation("file_format", f"missing metadata {missing}", META_KEYS)
    reader = csv.reader(body)
    header = next(reader, None)
    if header != CURVE_COLUMNS:
        raise InvariantViolation("file_format", header, CURVE_COLUMNS)
    try:
        rows = [[float(x) for x in row] for row in reader]
        data = np.array(rows, dtype=float).reshape(-1, 5)
        params = GeneratingParams(float(meta["a"]), float(meta["b"]), int(meta["k"]), int(meta["n"]))
        length = float(meta["L"])
        n_samples = int(meta["n_samples"])
        closure = float(meta["closure_residual"])
    except ValueError as exc:
        raise InvariantViolation("file_format", str(exc), "numeric fields") from exc
    if len(data) != n_samples:
        raise InvariantViolation("n_samples", len(data), f"== {n_samples} rows")
    expected_s = np.arange(n_samples) * (length / n_samples)
    if not np.allclose(data[:, 0], expected_s, rtol=0, atol=1e-12 * max(length, 1.0)):
        raise InvariantViolation("sample_grid", float(np.max(np.abs(data[:, 0] - expected_s))),
                                 "s_i = i L / n_samples")
    curve = PlanarCurve(params, length, data[:, 1:3].copy(), data[:, 3].copy(),
                        data[:, 4].copy(), closure)
    return curve.validate(config) if validate else curve


def _jsonable(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_report_json(path, report):
    with open(path, "w") as fh:
        json.dump(_jsonable(report.to_dict()), fh, indent=2)
        fh.write("\n")


def write_rows_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) if isinstance(x, float) and math.isfinite(x)
                             else ("inf" if isinstance(x, float) and math.isinf(x) else x)
                             for x in row])
