"""JSON and CSV encodings of every result type, plus atomic file writes.

Reals are written as exact decimal strings and complex numbers as
{"re": ..., "im": ...}, so a JSON artifact decodes back to bit-identical
values.  Every document carries the schema tag ``oscgauss/1``.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import os
import re
import tempfile
from pathlib import Path

import mpmath
from mpmath import mpc, mpf

from . import asymptotics, orthopoly, potential, precision, verify
from .precision import complex_from_json, complex_to_json, real_from_str, real_to_str

__all__ = [
    "SCHEMA",
    "encode",
    "decode",
    "dumps",
    "loads",
    "to_csv",
    "atomic_write",
]

SCHEMA = "oscgauss/1"

_TYPES = {
    cls.__name__: cls
    for cls in (
        precision.PrecisionContext,
        orthopoly.MomentTable,
        orthopoly.RecurrenceTable,
        orthopoly.MonicPolynomial,
        orthopoly.QuadratureRule,
        potential.SCurve,
        potential.Trajectory,
        potential.QDClassification,
        asymptotics.Matrix2,
        asymptotics.AsymptoticPrediction,
        verify.ZeroCurveReport,
        verify.CdfReport,
        verify.ConvergenceRow,
        verify.ConvergenceTable,
    )
}
_ENUMS = {cls.__name__: cls for cls in (potential.Regime, asymptotics.Formula, precision.BranchMode)}
_REAL = re.compile(r"^-?\d(\.\d+)?e[+-]\d+$|^0$|^-?inf$|^nan$")


def _real_str(x: mpf) -> str:
    if mpmath.isinf(x):
        return "inf" if x > 0 else "-inf"
    if mpmath.isnan(x):
        return "nan"
    return real_to_str(x)


def encode(obj):
    """Plain JSON-compatible structure for a result object."""
    if isinstance(obj, mpc):
        return complex_to_json(obj)
    if isinstance(obj, mpf):
        return _real_str(obj)
    if isinstance(obj, enum.Enum):
        return {"enum": type(obj).__name__, "value": obj.value}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {"type": type(obj).__name__}
        for f in dataclasses.fields(obj):
            if f.name.startswith("_"):
                continue
            out[f.name] = encode(getattr(obj, f.name))
        return out
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(data):
    """Inverse of :func:`encode`."""
    if isinstance(data, dict):
        if set(data) == {"re", "im"}:
            return complex_from_json(data)
        if "enum" in data and set(data) == {"enum", "value"}:
            return _ENUMS[data["enum"]](data["value"])
        if "type" in data and data["type"] in _TYPES:
            cls = _TYPES[data["type"]]
            kwargs = {k: decode(v) for k, v in data.items() if k != "type"}
            return cls(**kwargs)
        return {k: decode(v) for k, v in data.items()}
    if isinstance(data, list):
        return tuple(decode(v) for v in data)
    if isinstance(data, str) and _REAL.match(data):
        if data in ("inf", "-inf", "nan"):
            return mpf(data)
        return real_from_str(data)
    return data


def dumps(obj, **meta) -> str:
    doc = {"schema": SCHEMA, **{k: encode(v) for k, v in meta.items()}, "data": encode(obj)}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def loads(text: str):
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    return decode(doc["data"])


def _c(z):
    if not isinstance(z, mpc):
        z = mpc(z)
    return [real_to_str(z.real), real_to_str(z.imag)]


def _rows(obj) -> tuple[list[str], list[list]]:
    if isinstance(obj, orthopoly.MomentTable):
        return ["k", "m_re", "m_im"], [[k, *_c(v)] for k, v in enumerate(obj.m)]
    if isinstance(obj, orthopoly.RecurrenceTable):
        head = ["k", "a_sq_re", "a_sq_im", "b_re", "b_im", "h_re", "h_im", "exists"]
        rows = []
        for k in range(obj.n + 1):
            a = _c(obj.a_sq[k]) if 0 < k < len(obj.a_sq) else ["", ""]
            b = _c(obj.b[k]) if k < len(obj.b) else ["", ""]
            h = _c(obj.h[k]) if k < len(obj.h) else ["", ""]
            rows.append([k, *a, *b, *h, int(obj.exists[k])])
        return head, rows
    if isinstance(obj, orthopoly.QuadratureRule):
        head = ["index", "node_re", "node_im", "weight_re", "weight_im"]
        return head, [[j, *_c(x), *_c(w)] for j, (x, w) in enumerate(zip(obj.nodes, obj.weights))]
    if isinstance(obj, potential.SCurve):
        arc = obj.arclength()
        return ["s", "re", "im", "mass"], [[repr(s), *_c(p), real_to_str(m)]
                                           for s, p, m in zip(arc, obj.points, obj.mass)]
    if isinstance(obj, potential.Trajectory):
        rows, s = [], 0.0
        prev = None
        for p in obj.points:
            if prev is not None:
                s += abs(complex(p) - complex(prev))
            rows.append([repr(s), *_c(p)])
            prev = p
        return ["s", "re", "im"], rows
    if isinstance(obj, potential.QDClassification):
        zs = _c(obj.z_star) if obj.z_star is not None else ["", ""]
        return (["lambda", "regime", "z_star_re", "z_star_im", "im_xi_zstar"],
                [[real_to_str(obj.lam), obj.regime.value, *zs, _real_str(obj.im_xi_zstar)]])
    if isinstance(obj, verify.ZeroCurveReport):
        return ["n", "index", "distance", "param"], [[obj.n, j, real_to_str(d), repr(p)]
                                                     for j, (d, p) in enumerate(zip(obj.distances, obj.params))]
    if isinstance(obj, verify.CdfReport):
        return ["n", "lambda", "ks_stat"], [[obj.n, real_to_str(obj.lam), real_to_str(obj.ks_stat)]]
    if isinstance(obj, verify.ConvergenceTable):
        head = ["n", "quantity", "computed_re", "computed_im", "predicted_re", "predicted_im", "rel_err", "error"]
        rows = []
        for r in obj.rows:
            c = _c(r.computed) if r.computed is not None else ["", ""]
            p = _c(r.predicted) if r.predicted is not None else ["", ""]
            e = real_to_str(r.rel_err) if r.rel_err is not None else ""
            rows.append([r.n, r.quantity, *c, *p, e, r.error or ""])
        return head, rows
    if isinstance(obj, (list, tuple)) and all(isinstance(v, mpc) for v in obj):
        return ["index", "re", "im"], [[j, *_c(v)] for j, v in enumerate(obj)]
    raise TypeError(f"no CSV layout for {type(obj).__name__}")


def to_csv(obj) -> str:
    """CSV text for one result, or for a sequence of same-layout results.

    A sequence gets a leading ``part`` column holding each row's position in it.
    """
    if isinstance(obj, (list, tuple)) and obj and not all(isinstance(v, mpc) for v in obj):
        parts = [_rows(v) for v in obj]
        if any(h != parts[0][0] for h, _r in parts):
            raise TypeError("results with different CSV layouts")
        head = ["part", *parts[0][0]]
        rows = [[j, *r] for j, (_h, rs) in enumerate(parts) for r in rs]
    else:
        head, rows = _rows(obj)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(head)
    w.writerows(rows)
    return buf.getvalue()


def atomic_write(path, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
