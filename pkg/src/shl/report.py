"""Deterministic report serialization: canonical JSON, CSV tables, figures.

The JSON writer guarantees byte-identical output for identical inputs: keys
are sorted, floats are rendered at 17 significant digits (round-trip exact
for doubles), and non-finite values become the strings "inf"/"-inf"/"nan"
(strict JSON has no literals for them).  CSV uses the same float rendering,
a header row, comma separator, UTF-8 and "\n" line endings.

Figures are optional conveniences rendered next to the delimited output via
the Agg backend; they are not covered by the byte-determinism guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

__all__ = ["CheckResult", "format_float", "canonical_json", "write_json", "write_csv", "save_line_figure"]


@dataclass(frozen=True)
class CheckResult:
    """One verified inequality (or equality): lhs vs rhs with pass flag."""

    name: str
    lhs: float
    rhs: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def row(self) -> dict:
        return {
            "name": self.name,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "margin": float(self.margin),
            "pass": bool(self.passed),
        }


def format_float(x: float) -> str:
    """17-significant-digit decimal form; "inf"/"-inf"/"nan" for non-finite."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _encode(obj) -> str:
    # bool must be tested before int (bool is a subclass of int)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, str):
        return _encode_str(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        f = format_float(obj)
        return _encode_str(f) if f in ("inf", "-inf", "nan") else f
    if isinstance(obj, Mapping):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        inner = ",".join(f"{_encode_str(str(k))}:{_encode(v)}" for k, v in items)
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    # numpy scalars and arrays
    if hasattr(obj, "tolist"):
        return _encode(obj.tolist())
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def _encode_str(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def canonical_json(obj) -> str:
    return _encode(obj) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(obj))


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Plain CSV: header + rows, floats at 17 significant digits."""

    def cell(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return format_float(v)
        if isinstance(v, int):
            return str(v)
        s = str(v)
        if any(c in s for c in ',"\n'):
            s = '"' + s.replace('"', '""') + '"'
        return s

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cell(h) for h in header) + "\n")
        for row in rows:
            fh.write(",".join(cell(v) for v in row) + "\n")


def save_line_figure(path, curves, *, title: str, xlabel: str, ylabel: str, logy: bool = False) -> None:
    """Render labeled (x, y) curves to a PNG.

    curves: sequence of (label, xs, ys[, style]) tuples.  Import of
    matplotlib is deferred so library users without a display stack never
    pay for it.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for curve in curves:
        label, xs, ys = curve[0], curve[1], curve[2]
        style = curve[3] if len(curve) > 3 else "-"
        ax.plot(xs, ys, style, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    if len(curves) > 1 or (curves and curves[0][0]):
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
