"""Deterministic writers for manifests, diagnostics streams and SVG plots."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from ..flow import H_KINDS, DiagnosticsRecord

CONVENTIONS = {
    "willmore": "integral of |u|^2 dx dy",
    "J": "integral of h dz^dzbar with dz^dzbar = -2i dx dy",
    "willmore_drift": "max |W(t) - W(0)| / |W(0)|",
    "J_drift": "max |J(t) - J(0)| / (1 + |J(0)|)",
    "grid": "x = i lx / nx, y = j ly / ny, arrays indexed [i, j]",
    "d": "(d/dx - i d/dy) / 2, spectral, Nyquist mode dropped",
    "gauge_of_inverses": "zero mean",
}


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def records_to_jsonl(records: list[DiagnosticsRecord]) -> str:
    return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in records)


def records_from_jsonl(text: str) -> list[DiagnosticsRecord]:
    return [DiagnosticsRecord.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]


def records_to_csv(records: list[DiagnosticsRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["step", "t", "W"]
    for k in H_KINDS:
        header += [f"J_{k}_re", f"J_{k}_im"]
    w.writerow(header + ["dirac_residual_max", "closedness_max"])
    for r in records:
        row = [r.step, repr(r.t), repr(r.W)]
        for k in H_KINDS:
            row += [repr(r.J[k].real), repr(r.J[k].imag)]
        w.writerow(row + [repr(r.dirac_residual_max), repr(r.closedness_max)])
    return buf.getvalue()


def drift_series(records: list[DiagnosticsRecord]) -> dict[str, list[float]]:
    r0 = records[0]
    wscale = abs(r0.W) if r0.W != 0 else 1.0
    out = {"W": [abs(r.W - r0.W) / wscale for r in records]}
    for k in H_KINDS:
        out[f"J {k}"] = [abs(r.J[k] - r0.J[k]) / (1 + abs(r0.J[k])) for r in records]
    return out


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _f(v: float) -> str:
    return f"{v:.3f}"


def drift_svg(records: list[DiagnosticsRecord], title: str = "relative drift") -> str:
    """SVG 1.1 line chart of the W and J drifts against t, log10 vertical axis."""
    width, height, left, right, top, bottom = 640, 400, 70, 190, 30, 50
    pw, ph = width - left - right, height - top - bottom
    series = drift_series(records)
    t = [r.t for r in records]
    t0, t1 = t[0], t[-1] if t[-1] > t[0] else t[0] + 1.0
    floor = 1e-17
    logs = {k: [np.log10(max(v, floor)) for v in vals] for k, vals in series.items()}
    lo = np.floor(min(min(v) for v in logs.values()))
    hi = np.ceil(max(max(v) for v in logs.values()))
    if hi <= lo:
        hi = lo + 1

    def sx(tv):
        return left + pw * (tv - t0) / (t1 - t0)

    def sy(lv):
        return top + ph * (hi - lv) / (hi - lo)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="20" font-family="sans-serif" font-size="14">{title}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for e in range(int(lo), int(hi) + 1):
        y = _f(sy(e))
        out.append(f'<line x1="{left - 4}" y1="{y}" x2="{left}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y}" font-family="sans-serif" font-size="10" '
                   f'text-anchor="end" dominant-baseline="middle">1e{e}</text>')
    for tv in (t0, (t0 + t1) / 2, t1):
        x = _f(sx(tv))
        out.append(f'<text x="{x}" y="{top + ph + 16}" font-family="sans-serif" font-size="10" '
                   f'text-anchor="middle">{tv:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" font-family="sans-serif" '
               f'font-size="12" text-anchor="middle">t</text>')
    for i, (name, vals) in enumerate(logs.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{_f(sx(tv))},{_f(sy(lv))}" for tv, lv in zip(t, vals))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 14 + 18 * i
        out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 32}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 38}" y="{ly + 4}" font-family="sans-serif" font-size="10">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
