"""Report serialization: JSON envelopes, versioned CSV tables, SVG tail plot.

JSON is written with sorted keys and ``repr`` floats, so identical reports
serialize to identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable

from .bounds import BoundParams, BoundResult, Validity
from .experiments import (
    BreakdownReport,
    DeviationReport,
    EfficiencyReport,
    InsufficientTailError,
    tail_fit,
)

__all__ = [
    "CSV_VERSION",
    "to_json",
    "from_json",
    "breakdown_csv",
    "deviation_csv",
    "efficiency_csv",
    "bounds_csv",
    "bounds_dict",
    "tail_svg",
]

CSV_VERSION = 1
SCHEMA = 1

_REPORT_TYPES = {
    "breakdown": BreakdownReport,
    "deviation": DeviationReport,
    "efficiency": EfficiencyReport,
}


def _kind_of(report) -> str:
    for name, cls in _REPORT_TYPES.items():
        if isinstance(report, cls):
            return name
    raise TypeError(f"not a report: {type(report).__name__}")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def to_json(report, extra: dict | None = None) -> str:
    """Serialize a report (or list of breakdown reports) with a typed envelope."""
    if isinstance(report, (list, tuple)):
        body = {"reports": [r.to_dict() for r in report]}
        kind = _kind_of(report[0]) if report else "breakdown"
        env = {"schema": SCHEMA, "report": kind + "_set", **body}
    else:
        env = {"schema": SCHEMA, "report": _kind_of(report), "data": report.to_dict()}
    if extra:
        env["extra"] = extra
    return _dumps(env)


def from_json(text: str):
    """Inverse of :func:`to_json` (the ``extra`` block is dropped)."""
    env = json.loads(text)
    if env.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {env.get('schema')!r}")
    kind = env.get("report", "")
    if kind.endswith("_set"):
        cls = _REPORT_TYPES[kind[: -len("_set")]]
        return [cls.from_dict(d) for d in env["reports"]]
    if kind not in _REPORT_TYPES:
        raise ValueError(f"unknown report type {kind!r}")
    return _REPORT_TYPES[kind].from_dict(env["data"])


def _table(command: str, seed, header: list[str], rows: Iterable[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# robust-mean-lab report v{CSV_VERSION}, command={command}, seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


BREAKDOWN_COLUMNS = [
    "estimator", "n", "points", "empirical_rbp", "theoretical_rbp", "relation", "agrees", "monotone",
]


def breakdown_csv(reports: list[BreakdownReport], seed) -> str:
    """One row per estimator. ``relation`` is ``=`` where the theory gives
    the exact value and ``<=`` where it gives an upper bound."""
    rows = []
    for r in reports:
        exact = r.estimator.kind in ("mean", "catoni", "median", "winsorized")
        emp = r.empirical_rbp
        if emp is None:
            agrees = False
        else:
            agrees = emp == r.theoretical_rbp if exact else emp <= r.theoretical_rbp
        rows.append([
            r.estimator.label,
            r.n,
            r.points,
            "" if emp is None else f"{emp.numerator}/{emp.denominator}",
            f"{r.theoretical_rbp.numerator}/{r.theoretical_rbp.denominator}",
            "=" if exact else "<=",
            agrees,
            r.monotone,
        ])
    return _table("breakdown", seed, BREAKDOWN_COLUMNS, rows)


DEVIATION_COLUMNS = [
    "estimator", "family", "n", "trials", "eps", "m", "target", "delta", "quantile_at_delta", "r", "survival",
]


def deviation_csv(report: DeviationReport) -> str:
    r = report
    rows = [
        [r.estimator.label, r.dist.family, r.n, r.trials, r.eps, r.m, r.target, r.delta, r.quantile_at_delta, rr, p]
        for rr, p in r.tail_curve
    ]
    return _table("deviation", r.seed, DEVIATION_COLUMNS, rows)


EFFICIENCY_COLUMNS = ["estimator", "family", "n", "trials", "mean_estimate", "se", "se_ratio", "relative_efficiency"]


def efficiency_csv(report: EfficiencyReport) -> str:
    rows = [
        [row.estimator.label, report.dist.family, report.n, report.trials,
         row.mean_estimate, row.se, row.se_ratio, row.relative_efficiency]
        for row in report.rows
    ]
    return _table("efficiency", report.seed, EFFICIENCY_COLUMNS, rows)


BOUNDS_COLUMNS = [
    "n", "delta", "eps", "eps_star", "beta", "mu", "sigma", "sigma_x", "c1", "c2",
    "statistical", "quantile_shift", "contamination", "bound", "delta_star", "valid", "min_n",
]


def bounds_dict(params: BoundParams, result: BoundResult, validity: Validity) -> dict:
    return {
        "params": params.to_dict(),
        "statistical": result.statistical,
        "quantile_shift": result.quantile_shift,
        "contamination": result.contamination,
        "bound": result.value,
        "delta_star": validity.delta_star,
        "valid": validity.valid,
        "min_n": validity.min_n,
    }


def bounds_csv(params: BoundParams, result: BoundResult, validity: Validity, seed) -> str:
    p = params
    row = [
        p.n, p.delta, p.eps, p.eps_star, p.beta, p.mu, p.sigma, p.sigma_x, p.c1, p.c2,
        result.statistical, result.quantile_shift, result.contamination, result.value,
        validity.delta_star, validity.valid, validity.min_n,
    ]
    return _table("bounds", seed, BOUNDS_COLUMNS, [row])


def tail_svg(report: DeviationReport, width: int = 480, height: int = 320) -> str:
    """Self-contained SVG of ``log P(dev > r)`` against ``r**2`` with the
    least-squares line from :func:`tail_fit` (omitted if the fit fails)."""
    pts = [(r * r, math.log(p)) for r, p in report.tail_curve if p > 0]
    pad = 48
    if not pts:
        pts = [(0.0, 0.0)]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" style="background:#ffffff;font-family:sans-serif;font-size:11px">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'style="fill:none;stroke:#444444;stroke-width:1"/>',
        f'<text x="{width / 2:.1f}" y="{pad / 2:.1f}" style="text-anchor:middle;font-size:13px">'
        f"{report.estimator.label}, {report.dist.family}, n={report.n}</text>",
        f'<text x="{width / 2:.1f}" y="{height - 10}" style="text-anchor:middle">r^2</text>',
        f'<text x="14" y="{height / 2:.1f}" transform="rotate(-90 14 {height / 2:.1f})" '
        'style="text-anchor:middle">log P(|T - target| &gt; r)</text>',
        f'<text x="{pad}" y="{height - pad + 14}" style="text-anchor:middle">{x0:.3g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 14}" style="text-anchor:middle">{x1:.3g}</text>',
        f'<text x="{pad - 4}" y="{sy(y0):.1f}" style="text-anchor:end">{y0:.2f}</text>',
        f'<text x="{pad - 4}" y="{sy(y1):.1f}" style="text-anchor:end">{y1:.2f}</text>',
    ]
    for x, y in pts:
        out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" style="fill:#1f77b4"/>')
    try:
        fit = tail_fit(report)
    except InsufficientTailError:
        fit = None
    if fit is not None:
        ya, yb = fit.intercept + fit.slope * x0, fit.intercept + fit.slope * x1
        out.append(
            f'<line x1="{sx(x0):.2f}" y1="{sy(ya):.2f}" x2="{sx(x1):.2f}" y2="{sy(yb):.2f}" '
            'style="stroke:#d62728;stroke-width:1.5"/>'
        )
        out.append(
            f'<text x="{width - pad - 4}" y="{pad + 14}" style="text-anchor:end">'
            f"slope {fit.slope:.4g}, r2 {fit.r_squared:.3f}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
