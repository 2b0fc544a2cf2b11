"""Line-oriented structured-text records.

A stream holds one or more records. Each record starts with ``kind = <name>``
and continues with lines of three shapes:

    key = value              scalar (int, float, true/false, or text)
    key[] = v1 v2 v3 ...     float array
    row = c1 c2 c3 ...       table row; column names given by ``columns = ...``

Blank lines and lines starting with ``#`` are ignored. Floats are written with
``repr`` so they re-parse bit-identically.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np


class RecordError(ValueError):
    """Malformed record text or a record of the wrong kind."""


@dataclass
class Record:
    kind: str
    scalars: dict = field(default_factory=dict)
    arrays: dict = field(default_factory=dict)
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def __getitem__(self, key):
        if key in self.arrays:
            return self.arrays[key]
        if key in self.scalars:
            return self.scalars[key]
        raise RecordError(f"record {self.kind!r} has no field {key!r}")

    def get(self, key, default=None):
        try:
            return self[key]
        except RecordError:
            return default


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    s = str(v)
    if "\n" in s:
        raise RecordError("text values must be single-line")
    return s


def _parse_scalar(s: str):
    if s == "true":
        return True
    if s == "false":
        return False
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def dumps(records: Iterable[Record]) -> str:
    out = []
    for rec in records:
        out.append(f"kind = {rec.kind}")
        for k, v in rec.scalars.items():
            out.append(f"{k} = {_fmt(v)}")
        for k, arr in rec.arrays.items():
            vals = " ".join(repr(float(x)) for x in np.asarray(arr, dtype=float).ravel())
            out.append(f"{k}[] = {vals}".rstrip())
        if rec.columns:
            out.append("columns = " + " ".join(rec.columns))
        for row in rec.rows:
            out.append("row = " + " ".join(_fmt(v) for v in row))
        out.append("")
    return "\n".join(out)


def loads(text: str) -> list[Record]:
    records: list[Record] = []
    cur: Record | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise RecordError(f"line {lineno}: expected 'key = value'")
        key, _, value = (part.strip() for part in line.partition("="))
        if not key:
            raise RecordError(f"line {lineno}: empty key")
        if key == "kind":
            cur = Record(kind=value)
            records.append(cur)
            continue
        if cur is None:
            raise RecordError(f"line {lineno}: field before any 'kind' line")
        if key.endswith("[]"):
            try:
                cur.arrays[key[:-2]] = np.array([float(t) for t in value.split()])
            except ValueError as exc:
                raise RecordError(f"line {lineno}: bad number in array") from exc
        elif key == "columns":
            cur.columns = value.split()
        elif key == "row":
            cur.rows.append([_parse_scalar(t) for t in value.split()])
        else:
            cur.scalars[key] = _parse_scalar(value)
    return records


def dump(records: Iterable[Record], fh: TextIO) -> None:
    fh.write(dumps(records))


def load(fh: TextIO) -> list[Record]:
    return loads(fh.read())


def plot_text(x, y) -> str:
    """Plain two-column text."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    return "".join(f"{a!r} {b!r}\n" for a, b in zip(x.tolist(), y.tolist()))


def expect(rec: Record, kind: str) -> Record:
    if rec.kind != kind:
        raise RecordError(f"expected record kind {kind!r}, got {rec.kind!r}")
    return rec


def find(records: list[Record], kind: str) -> Record:
    for rec in records:
        if rec.kind == kind:
            return rec
    raise RecordError(f"no record of kind {kind!r}")


# ----------------------------------------------------------------------------
# domain converters


def periodic_fn_record(f, kind: str = "periodic_fn") -> Record:
    rec = Record(kind, scalars={"grid_size": f.grid_size}, arrays={"samples": f.samples})
    if f.label:
        rec.scalars["label"] = f.label
    return rec


def periodic_fn_from_record(rec: Record):
    from .core import PeriodicFn

    s = rec["samples"]
    m = rec.get("grid_size", s.size)
    if m != s.size:
        raise RecordError(f"grid_size {m} does not match {s.size} samples")
    label = rec.get("label")
    return PeriodicFn(s, None if label is None else str(label))


def spectral_data_record(sd) -> Record:
    return Record("spectral_data", scalars={"N": sd.N, "lambda0": sd.lambda0}, arrays={
        "band_minus": sd.band_edges[:, 0],
        "band_plus": sd.band_edges[:, 1],
        "dirichlet": sd.dirichlet,
        "norming": sd.norming,
    })


def spectral_data_from_record(rec: Record):
    from .hill import SpectralData

    expect(rec, "spectral_data")
    edges = np.column_stack([rec["band_minus"], rec["band_plus"]])
    return SpectralData(lambda0=float(rec["lambda0"]), band_edges=edges,
                        dirichlet=rec["dirichlet"], norming=rec["norming"])


def gap_vector_record(gv) -> Record:
    rec = Record("gap_vector", scalars={"N": gv.N}, columns=["n", "psi1", "psi2"])
    rec.rows = [[n + 1, float(a), float(b)] for n, (a, b) in enumerate(gv.entries)]
    return rec


def gap_vector_from_record(rec: Record):
    from .gapmap import GapVector

    expect(rec, "gap_vector")
    rows = sorted(rec.rows, key=lambda r: r[0])
    if [r[0] for r in rows] != list(range(1, len(rows) + 1)):
        raise RecordError("gap vector rows must be numbered 1..N")
    return GapVector(np.array([[float(r[1]), float(r[2])] for r in rows]))


def estimate_record(report, kind: str = "estimate_report") -> Record:
    rec = Record(kind, scalars={"pass": report.passed}, columns=["name", "lhs", "rhs", "slack", "pass"])
    rec.rows = [list(row) for row in report.table()]
    return rec


def checklist_record(checks: dict, kind: str = "checklist") -> Record:
    rec = Record(kind, columns=["name", "value", "pass"])
    rec.rows = [[name, float(v), bool(ok)] for name, (v, ok) in checks.items()]
    return rec


def inversion_record(res) -> Record:
    return Record("inversion_result", scalars={
        "lambda0": res.lambda0,
        "residual": res.residual,
        "exponent": res.exponent,
        "h0": res.h0,
        "grid_size": res.q.grid_size,
    }, arrays={"q_samples": res.q.samples, "h_samples": res.h.samples})


def inversion_from_record(rec: Record):
    from .core import PeriodicFn
    from .inverse import InversionResult

    expect(rec, "inversion_result")
    return InversionResult(q=PeriodicFn(rec["q_samples"]), h=PeriodicFn(rec["h_samples"]),
                           lambda0=float(rec["lambda0"]), residual=float(rec["residual"]),
                           exponent=float(rec["exponent"]), h0=float(rec["h0"]))


def embedding_record(emb) -> Record:
    return Record("embedding", scalars={"a": emb.a}, arrays={"R_samples": emb.R.samples})


def embedding_from_record(rec: Record):
    from .core import PeriodicFn
    from .geometry import TorusEmbedding

    expect(rec, "embedding")
    return TorusEmbedding(float(rec["a"]), PeriodicFn(rec["R_samples"]))


def profile_record(pr) -> Record:
    return Record("profile", scalars={"b": pr.b, "r0": pr.r0, "max_slope": pr.max_slope,
                                      "grid_size": pr.q.grid_size},
                  arrays={"q_samples": pr.q.samples, "h_samples": pr.h.samples})


def profile_from_record(rec: Record):
    from .core import PeriodicFn
    from .geometry import Profile

    expect(rec, "profile")
    return Profile(r0=float(rec["r0"]), q=PeriodicFn(rec["q_samples"]), b=float(rec["b"]),
                   h=PeriodicFn(rec["h_samples"]), max_slope=float(rec["max_slope"]))
