"""Machine-readable check reports (JSON, schema 1) and CSV tables.

Floats are written with 17 significant digits so that parsing a report
gives back the identical numbers.  Field order is fixed and no wall-clock
data is included, so equal inputs produce byte-identical output.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["SCHEMA", "Check", "ResidualReport", "dumps", "loads", "write_report",
           "format_float", "write_csv", "read_csv"]

SCHEMA = 1


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


@dataclass(frozen=True)
class Check:
    """One named comparison ``value <= tolerance`` (or an explicit verdict)."""

    name: str
    value: float
    tolerance: float
    passed: bool

    @classmethod
    def below(cls, name: str, value: float, tolerance: float) -> "Check":
        return cls(name, float(value), float(tolerance), bool(abs(value) <= tolerance))

    @classmethod
    def above(cls, name: str, value: float, threshold: float) -> "Check":
        """Negative controls: passes when ``|value| > threshold``."""
        return cls(name, float(value), float(threshold), bool(abs(value) > threshold))


@dataclass
class ResidualReport:
    command: str
    params: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def check(self, name: str):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "pass": self.passed,
            "params": dict(sorted(self.params.items())),
            "checks": [
                {"name": c.name, "value": c.value, "tolerance": c.tolerance, "pass": c.passed}
                for c in self.checks
            ],
            "provenance": dict(sorted(self.provenance.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        checks = [Check(c["name"], c["value"], c["tolerance"], c["pass"]) for c in d["checks"]]
        return cls(d["command"], dict(d["params"]), checks, dict(d["provenance"]))


def _emit(obj, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{pad}{json.dumps(str(k))}: {_emit(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _emit(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _emit(obj.item(), indent)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(report: ResidualReport | dict) -> str:
    d = report.to_dict() if isinstance(report, ResidualReport) else report
    return _emit(d, 0) + "\n"


def loads(text: str) -> ResidualReport:
    return ResidualReport.from_dict(json.loads(text))


def write_report(report: ResidualReport | dict, path) -> Path:
    path = Path(path)
    path.write_text(dumps(report), encoding="utf-8")
    return path


def _cell(v):
    return format_float(v) if isinstance(v, float) else v


def write_csv(target, header, rows) -> str:
    """Write an RFC-4180 table to ``target`` (path, file object or ``None``).

    Returns the CSV text.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    text = buf.getvalue()
    if target is None:
        return text
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8", newline="")
    return text


def read_csv(source) -> tuple[list, list]:
    """Header and rows of a CSV file or text; numeric cells become floats.

    A ``str`` containing a newline is taken as CSV text, anything else as a path.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = str(source)
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader)
    rows = []
    for row in reader:
        out = []
        for cell in row:
            try:
                out.append(float(cell))
            except ValueError:
                out.append(cell)
        rows.append(out)
    return header, rows
