"""Grid evaluation, CSV output and the closed-form vs. oracle validation report."""

from __future__ import annotations

import csv
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .atmosphere import BAND, Environment, OutOfBandWarning, absorption_terms
from .config import SweepSpec
from .mcsim import McConfig, estimate_op
from .outage import (Diagnostics, Method, Scenario, cdf_link_bm_closed, cdf_link_nobm,
                     combine_links, outage_probability)

__all__ = [
    "format_float",
    "write_csv",
    "point_seed",
    "evaluate_point",
    "run_sweep",
    "ValidationReport",
    "validate",
    "absorption_table",
    "GAP_FLOOR",
    "QUAD_FLOOR",
]

GAP_FLOOR = 1e-6  # absolute slack in the closed-form agreement test
QUAD_FLOOR = 1e-9  # relative gaps only where the reference OP exceeds this


def format_float(x: float) -> str:
    return f"{x:.17g}"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    if v is None:
        return ""
    return str(v)


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[dict]) -> None:
    """UTF-8, LF-terminated CSV with 17-significant-digit floats; ``"-"`` is stdout."""
    if str(path) == "-":
        _write_rows(sys.stdout, header, rows)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_rows(fh, header, rows)


def _write_rows(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row.get(h)) for h in header])


def point_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for grid point ``index``."""
    state = np.random.SeedSequence([seed, index, 0x5357]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _closed_form_op(s: Scenario, diag: Diagnostics, literal: bool) -> float:
    x = s.snr_threshold
    fs = []
    for link in (s.link1, s.link2):
        if link.has_misalignment:
            fs.append(cdf_link_bm_closed(x, link, s.environment, diag, literal=literal))
        else:
            fs.append(cdf_link_nobm(x, link, s.environment))
    if any(math.isnan(f) for f in fs):
        return math.nan
    return combine_links(*fs)


def evaluate_point(s: Scenario, methods: Sequence[Method], mc: McConfig, index: int = 0,
                   literal: bool = False) -> dict:
    """OP under each requested method, plus diagnostics, for one scenario."""
    row: dict = {}
    flags: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", OutOfBandWarning)
        for m in methods:
            m = Method(m)
            if m is Method.MONTE_CARLO:
                est = estimate_op(s, McConfig(trials=mc.trials, seed=point_seed(mc.seed, index),
                                              chunks=mc.chunks), workers=1)
                row["op_monte_carlo"] = est.op_hat
                row["stderr_monte_carlo"] = est.stderr
            elif m is Method.CLOSED_FORM:
                diag = Diagnostics()
                row["op_closed_form"] = _closed_form_op(s, diag, literal=False)
                row["clamp_events"] = diag.clamp_events
                flags.extend(f"closed:{f}" for f in diag.flags())
                if literal:
                    ldiag = Diagnostics()
                    row["op_closed_form_literal"] = _closed_form_op(s, ldiag, literal=True)
                    flags.extend(f"literal:{f}" for f in ldiag.flags())
            else:
                res = outage_probability(s, m)
                row[f"op_{m.value}"] = res.op
                flags.extend(f"{m.value}:{f}" for f in res.flags)
    if any(issubclass(w.category, OutOfBandWarning) for w in caught):
        flags.append("out_of_band")
    row["diagnostics"] = ";".join(sorted(set(flags)))
    return row


def _eval_task(args):
    spec, point, index, methods, literal = args
    return evaluate_point(spec.scenario_at(point), methods, spec.mc, index, literal)


def _evaluate_grid(spec: SweepSpec, methods, jobs: int, literal: bool = False) -> list[dict]:
    grid = spec.grid()
    tasks = [(spec, p, i, tuple(methods), literal) for i, p in enumerate(grid)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_eval_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_eval_task(t) for t in tasks]
    rows = []
    for point, res in zip(grid, results):
        row = {ax.path: v for ax, v in zip(spec.axes, point)}
        row.update(res)
        rows.append(row)
    return rows


def sweep_header(spec: SweepSpec) -> list[str]:
    cols = [ax.path for ax in spec.axes]
    for m in spec.methods:
        cols.append(f"op_{m.value}")
        if m is Method.MONTE_CARLO:
            cols.append("stderr_monte_carlo")
    cols.append("diagnostics")
    return cols


def run_sweep(spec: SweepSpec, out_path: Optional[Union[str, Path]] = None, jobs: int = 1) -> list[dict]:
    """Evaluate every grid point (axis1 slowest) and optionally write the CSV."""
    rows = _evaluate_grid(spec, spec.methods, jobs)
    if out_path is not None:
        write_csv(out_path, sweep_header(spec), rows)
    return rows


@dataclass
class ValidationReport:
    rows: list[dict]
    tolerance: float
    axes: tuple[str, ...]
    literal: bool = False
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed"))

    def header(self) -> list[str]:
        cols = list(self.axes) + ["op_closed_form"]
        if self.literal:
            cols.append("op_closed_form_literal")
        cols += ["op_quadrature", "op_monte_carlo", "stderr_monte_carlo", "relative_gap"]
        if self.literal:
            cols.append("relative_gap_literal")
        cols += ["agree", "mc_within_3se", "clamp_events", "diagnostics"]
        return cols

    def write(self, path: Union[str, Path]) -> None:
        write_csv(path, self.header(), self.rows)

    def summary_lines(self) -> list[str]:
        s = self.summary
        lines = [
            f"points: {s['points']}",
            f"closed form vs quadrature: {s['flagged']} point(s) beyond max({GAP_FLOOR:g}, "
            f"{self.tolerance:g}*OP); max relative gap {format_float(s['max_relative_gap'])}",
            f"monte carlo within 3 stderr of quadrature: {s['mc_within_3se']}/{s['points']}",
        ]
        if self.literal:
            lines.append(f"literal closed form: {s['literal_flagged']} point(s) disagree, "
                         f"{s['literal_broken']} numerically broken; max relative gap "
                         f"{format_float(s['max_relative_gap_literal'])}")
        lines.append("PASS" if self.passed else "FAIL")
        return lines


def _agrees(closed: float, quad: float, tol: float) -> bool:
    return math.isfinite(closed) and abs(closed - quad) <= max(GAP_FLOOR, tol * quad)


def _rel_gap(closed: float, quad: float) -> Optional[float]:
    if quad > QUAD_FLOOR:
        return abs(closed - quad) / quad if math.isfinite(closed) else math.inf
    return None


def validate(spec: SweepSpec, tolerance: float = 0.01, jobs: int = 1, literal: bool = True) -> ValidationReport:
    """Closed form, quadrature and Monte-Carlo at every grid point.

    A point is flagged when |OP_closed - OP_quad| > max(1e-6, tolerance * OP_quad).
    The report passes when no point is flagged. With ``literal`` the
    factor-by-factor closed form is evaluated too and its gap reported; it
    does not affect pass/fail.
    """
    methods = (Method.CLOSED_FORM, Method.QUADRATURE, Method.MONTE_CARLO)
    rows = _evaluate_grid(spec, methods, jobs, literal=literal)
    flagged = 0
    lit_flagged = lit_broken = 0
    mc_ok = 0
    gaps, lit_gaps = [], []
    for row in rows:
        c, q = row["op_closed_form"], row["op_quadrature"]
        row["agree"] = _agrees(c, q, tolerance)
        flagged += not row["agree"]
        row["relative_gap"] = _rel_gap(c, q)
        if row["relative_gap"] is not None:
            gaps.append(row["relative_gap"])
        mc, se = row["op_monte_carlo"], row["stderr_monte_carlo"]
        row["mc_within_3se"] = abs(mc - q) <= 3.0 * se
        mc_ok += row["mc_within_3se"]
        if literal:
            cl = row["op_closed_form_literal"]
            lit_broken += not math.isfinite(cl)
            lit_flagged += not _agrees(cl, q, tolerance)
            row["relative_gap_literal"] = _rel_gap(cl, q)
            if row["relative_gap_literal"] is not None:
                lit_gaps.append(row["relative_gap_literal"])
    summary = {
        "points": len(rows),
        "flagged": flagged,
        "max_relative_gap": max(gaps, default=0.0),
        "mc_within_3se": mc_ok,
        "passed": flagged == 0,
    }
    if literal:
        summary.update(literal_flagged=lit_flagged, literal_broken=lit_broken,
                       max_relative_gap_literal=max(lit_gaps, default=0.0))
    return ValidationReport(rows=rows, tolerance=tolerance, axes=tuple(ax.path for ax in spec.axes),
                            literal=literal, summary=summary)


def absorption_table(env: Environment, start: float = BAND[0], stop: float = BAND[1],
                     points: int = 151) -> list[dict]:
    """beta(f) and its components on a linear frequency grid, for both line shapes."""
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfBandWarning)
        for f in np.linspace(start, stop, points):
            f = float(f)
            u1, u2, u3 = absorption_terms(f, env, "squared")
            p1, p2, _ = absorption_terms(f, env, "printed")
            rows.append({
                "frequency": f,
                "beta": (u1 + u2) + u3,
                "u1": u1,
                "u2": u2,
                "u3": u3,
                "beta_printed": (p1 + p2) + u3,
                "in_band": BAND[0] <= f <= BAND[1],
            })
    return rows
