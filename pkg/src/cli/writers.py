"""
Result serialisation.

CSV columns are fixed per table. Rates, biases and widths are written as
percentages with one decimal, sample sizes and M * w with one decimal, and
cutoffs with six. JSON keeps full double precision.
"""
import csv
import json
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from src.engines.schemas import PosteriorSummary
from src.harness.schemas import CalibrationResult, SweepResult


def pct(value: Optional[float]) -> str:
    return "" if value is None else f"{100.0 * value:.1f}"


def one_decimal(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.1f}"


def cutoff(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def write_json(path: Path, payload: Any) -> Path:
    path.write_text(json.dumps(payload, indent=2, allow_nan=False) + "\n", encoding="utf-8")
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def safe_name(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in name)


def write_posterior_table(path: Path, labels: List[str], n: List[int], x: List[int], summaries: List[PosteriorSummary]) -> Path:
    """One row per type; mean, 95% interval and PP for each model side by side."""
    header = ["type", "n", "x"]
    for s in summaries:
        header += [f"{s.model} mean", f"{s.model} lower", f"{s.model} upper", f"{s.model} PP"]
    rows = []
    for i, label in enumerate(labels):
        row: List[Any] = [label, n[i], x[i]]
        for s in summaries:
            row += [pct(s.mean[i]), pct(s.lower[i]), pct(s.upper[i]), pct(s.pp[i])]
        rows.append(row)
    return write_csv(path, header, rows)


def write_mw_table(path: Path, summary: PosteriorSummary) -> Path:
    """Upper triangle of the posterior mean M * w_ij matrix, rows i, columns j > i."""
    labels = summary.labels
    rows = []
    for i, label in enumerate(labels[:-1]):
        rows.append([label] + ["" if j <= i else one_decimal(summary.mw[i][j]) for j in range(1, len(labels))])
    return write_csv(path, ["type"] + labels[1:], rows)


def write_ess_table(path: Path, summaries: List[PosteriorSummary]) -> Path:
    header = ["model", "type", "sd", "posterior ESS", "prior ESS"]
    rows = []
    for s in summaries:
        for i, label in enumerate(s.labels):
            prior = None if s.prior_ess is None else s.prior_ess[i]
            rows.append([s.model, label, pct(s.sd[i]), one_decimal(s.ess[i]), one_decimal(prior)])
    return write_csv(path, header, rows)


def write_calibration_table(path: Path, calibrations: List[CalibrationResult]) -> Path:
    size = max((len(c.achieved_type1_error or []) for c in calibrations), default=0)
    header = ["model", "cutoff", "target alpha", "replicates", "null PP median", "null PP q95"]
    header += [f"type{i + 1} type-1 error" for i in range(size)]
    rows = []
    for c in calibrations:
        achieved = c.achieved_type1_error or []
        rows.append(
            [c.model, cutoff(c.cutoff), pct(c.target_alpha), c.replicates,
             pct(c.null_pp_summary["median"]), pct(c.null_pp_summary["q95"])]
            + [pct(v) for v in achieved] + [""] * (size - len(achieved))
        )
    return write_csv(path, header, rows)


def write_oc_table(path: Path, sweep: SweepResult) -> Path:
    """One row per (scenario, model, type)."""
    header = ["scenario", "model", "type", "true rate", "effective", "cutoff",
              "rejection rate", "rejection SE", "bias", "ETI width", "prior ESS"]
    rows = []
    for r in sweep.results:
        for i, rate in enumerate(r.rates):
            prior = None if r.prior_ess is None else r.prior_ess[i]
            rows.append([
                r.scenario, r.model, i + 1, pct(rate), int(r.effective[i]), cutoff(r.cutoff),
                pct(r.rejection_rate[i]), pct(r.rejection_se[i]), pct(r.bias[i]), pct(r.eti_width[i]),
                one_decimal(prior),
            ])
    return write_csv(path, header, rows)


def write_cell_summary_table(path: Path, sweep: SweepResult) -> Path:
    """Per-cell averages split by effectiveness and posterior means of M and s."""
    header = ["scenario", "model", "replicates", "mean type-1 error", "mean power",
              "mean bias effective", "mean bias ineffective",
              "mean width effective", "mean width ineffective", "M", "s"]
    rows = [[
        r.scenario, r.model, r.replicates, pct(r.mean_type1_error), pct(r.mean_power),
        pct(r.mean_bias_effective), pct(r.mean_bias_ineffective),
        pct(r.mean_width_effective), pct(r.mean_width_ineffective),
        one_decimal(r.m_mean), "" if r.s_mean is None else f"{r.s_mean:.2f}",
    ] for r in sweep.results]
    return write_csv(path, header, rows)


def write_borrowing_table(path: Path, sweep: SweepResult) -> Path:
    """Posterior mean M * w_ij per unordered pair for models that report weights."""
    header = ["scenario", "model", "type i", "type j", "M*w"]
    rows = []
    for r in sweep.results:
        if r.mw is None:
            continue
        size = len(r.mw)
        for i in range(size):
            for j in range(i + 1, size):
                rows.append([r.scenario, r.model, i + 1, j + 1, one_decimal(r.mw[i][j])])
    return write_csv(path, header, rows)
