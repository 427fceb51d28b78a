from __future__ import annotations

import sys
from pathlib import Path
from typing import TYPE_CHECKING

# Each command is wrapped here to customize CLI docs and to keep imports lazy, so that
# `--help` stays fast without loading numpy and scipy.
if TYPE_CHECKING:
    from morseig.config.morseig_env import AnalysisOptions

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2
EXIT_INCONCLUSIVE = 3


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    from clideps.ui.rich_output import format_success
    from prettyfmt import fmt_path
    from rich import print as rprint

    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    rprint(format_success(f"Wrote {fmt_path(out)}"))


def _parse_point(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise ValueError(f"Point must be comma-separated numbers: {text!r}") from None


def help() -> None:
    """
    Show additional help and example usage.
    """
    from clideps.ui.rich_output import print_heading
    from rich import print as rprint
    from rich.markdown import Markdown

    from morseig.cli.cli_docs import HELP_PAGE

    print_heading(message="Using morseig")

    rprint()
    rprint(Markdown(HELP_PAGE))


def setup(show: bool = False) -> None:
    """
    Show or save default settings (tolerances, seed, worker threads).

    Settings live in `~/.config/morseig/env` and can also be set as `MORSEIG_*`
    environment variables or in a `.env` file. Flags override them.
    """
    from morseig.cli.cli_setup import interactive_setup, show_setup

    if show:
        show_setup()
    else:
        interactive_setup()


def table(nu: int = 8, field: str = "real", format: str = "md", out: Path | None = None) -> int:
    """
    Print the table of non-smooth Morse contributions for multiplicities 1 to `--nu`, by
    relative index.
    """
    from morseig.polyalg.fields import Field
    from morseig.polyalg.morse_table import TableFormat, emit_table

    fmt = TableFormat.csv if format == "csv" else TableFormat.md
    _emit(emit_table(nu, Field(field), fmt), out)
    return EXIT_OK


def classify(
    family: str, point: str, k: int, opts: AnalysisOptions, out: Path | None = None
) -> int:
    """
    Classify one point of one eigenvalue branch: regular, smooth critical, non-degenerate
    (non-smooth) critical, borderline or not covered, with certificates.
    """
    from morseig.classify.classify_point import classify_point
    from morseig.families.builtin_families import load_family
    from morseig.pipeline.report_io import ClassificationRecord, to_json

    fam = load_family(family)
    result = classify_point(fam, _parse_point(point), k, opts)
    _emit(to_json(ClassificationRecord.of(result)), out)
    return EXIT_OK if result.is_conclusive else EXIT_INCONCLUSIVE


def _scan_markdown(record) -> str:
    lines = [
        f"# {record.family}, lambda_{record.k} (grid {record.grid})",
        "",
        f"- Morse polynomial: {record.p_morse.text}",
        f"- Manifold polynomial: {record.p_manifold.text}",
        f"- Morse inequalities: {'satisfied' if record.satisfied else 'violated'}"
        + (f", remainder {record.remainder.text}" if record.remainder else ""),
        f"- Inconclusive: {'yes' if record.inconclusive else 'no'}",
        "",
        "| location | value | kind | mu | contribution |",
        "|---|---|---|---|---|",
    ]
    for cp in record.critical_points:
        loc = ", ".join(f"{v:.6f}" for v in cp.location)
        c = cp.classification
        mu = "" if c.mu is None else c.mu
        lines.append(f"| ({loc}) | {cp.value:.9g} | {c.kind} | {mu} | {c.contribution.text} |")
    lines += [f"- flag: {f}" for f in record.flags]
    return "\n".join(lines) + "\n"


def _scan_csv(record) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    coords = [f"x{j + 1}" for j in range(record.d)]
    writer.writerow([*coords, "value", "kind", "mu", "contribution"])
    for cp in record.critical_points:
        c = cp.classification
        mu = "" if c.mu is None else c.mu
        writer.writerow([*cp.location, cp.value, c.kind, mu, c.contribution.text])
    return buf.getvalue()


def scan(
    family: str,
    k: int,
    grid: int,
    opts: AnalysisOptions,
    format: str = "json",
    out: Path | None = None,
    manifold_poincare: str | None = None,
) -> int:
    """
    Find and classify all critical points of one eigenvalue branch on a torus, then check
    the Morse inequalities. Exit code 0 if they hold, 2 if violated, 3 if inconclusive.
    """
    from morseig.families.builtin_families import load_family
    from morseig.pipeline.corollaries import conseq_check
    from morseig.pipeline.report_io import MorseReportRecord, to_json
    from morseig.pipeline.scan import scan as run_scan
    from morseig.polyalg.int_poly import IntPoly

    fam = load_family(family)
    p_manifold = IntPoly.parse(manifold_poincare) if manifold_poincare else None
    report = run_scan(fam, k, grid, opts, p_manifold=p_manifold)
    record = MorseReportRecord.of(report, conseq_check(report))
    if format == "md":
        _emit(_scan_markdown(record), out)
    elif format == "csv":
        _emit(_scan_csv(record), out)
    else:
        _emit(to_json(record), out)
    return report.exit_code


def _vanhove_text(record) -> str:
    lines = [
        f"{record.family} (d={record.d}, n={record.n})",
        f"Saddle point and separation checks: {'passed' if record.passed else 'violated'}"
        + (" (inconclusive)" if record.inconclusive else ""),
    ]
    for c in record.checks:
        mark = "ok" if c.passed else "VIOLATED"
        lines.append(f"  {c.label}: lhs {c.lhs} {mark}")
    for s in record.separation:
        mark = "ok" if s.passed else "VIOLATED"
        lines.append(
            f"  lambda_{s.k_lower} vs lambda_{s.k_upper}: max {s.max_lower:.6g} < "
            f"{s.max_upper:.6g}, min {s.min_lower:.6g} < {s.min_upper:.6g} {mark}"
        )
    for k, counts in sorted(record.counts.items()):
        by_index = ", ".join(f"mu={mu}: {n}" for mu, n in sorted(counts.items()))
        lines.append(f"  lambda_{k} smooth critical points: {by_index}")
    return "\n".join(lines) + "\n"


def _hf_text(record) -> str:
    lines = [
        f"Hellmann-Feynman check: {'passed' if record.passed else 'FAILED'}",
        f"  trials: {record.trials}",
        f"  slopes checked: {record.checked} ({record.crossings} at forced crossings)",
        f"  skipped: {record.skipped}",
        f"  max relative error: {record.max_rel_error:.3g} (tol {record.tol:g})",
    ]
    if record.worst_family is not None:
        lines.append(f"  worst: {record.worst_family}, lambda_{record.worst_k}")
    return "\n".join(lines) + "\n"


def vanhove(
    family: str,
    grid: int,
    opts: AnalysisOptions,
    format: str = "json",
    out: Path | None = None,
    manifold_poincare: str | None = None,
) -> int:
    """
    Scan every branch of a family on T^2 or T^3 and check the lower bounds on smooth saddle
    points (van Hove singularities) and the strict separation of branch extrema.
    """
    from morseig.families.builtin_families import load_family
    from morseig.pipeline.corollaries import betti_bounds, minmax_separation, van_hove_table
    from morseig.pipeline.report_io import VanHoveRecord, to_json
    from morseig.pipeline.scan import scan_all
    from morseig.polyalg.int_poly import IntPoly

    fam = load_family(family)
    p_manifold = IntPoly.parse(manifold_poincare) if manifold_poincare else None
    reports = scan_all(fam, grid, opts, p_manifold=p_manifold)
    table = betti_bounds(reports, p_manifold) if p_manifold else van_hove_table(reports, fam.d)
    separation = minmax_separation(reports)
    record = VanHoveRecord.of(table, separation, reports)
    _emit(_vanhove_text(record) if format == "text" else to_json(record), out)
    if table.inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if record.passed else EXIT_VIOLATED


def hf_check(
    trials: int, opts: AnalysisOptions, format: str = "json", out: Path | None = None
) -> int:
    """
    Compare Hellmann-Feynman branch slopes with extrapolated secant slopes over seeded
    random families (both fields, d <= 3, n <= 6).
    """
    from morseig.pipeline.hf_check import run_hf_check
    from morseig.pipeline.report_io import HfCheckRecord, to_json

    result = run_hf_check(trials=trials, seed=opts.seed, opts=opts)
    record = HfCheckRecord.of(result)
    _emit(_hf_text(record) if format == "text" else to_json(record), out)
    return EXIT_OK if result.passed else EXIT_VIOLATED


def trace(
    family: str,
    point: str,
    k: int,
    step: float,
    max_steps: int,
    opts: AnalysisOptions,
    format: str = "csv",
    out: Path | None = None,
) -> int:
    """
    Trace a one-dimensional constant multiplicity stratum through a degenerate point and
    write the polyline (CSV) or a summary (JSON).
    """
    from morseig.families.builtin_families import load_family
    from morseig.pipeline.report_io import TraceRecord, to_json
    from morseig.stratum.stratum_trace import polyline_csv, trace_stratum

    fam = load_family(family)
    result = trace_stratum(fam, _parse_point(point), k, step=step, max_steps=max_steps, opts=opts)
    if format == "json":
        _emit(to_json(TraceRecord.of(fam.name, k, step, result)), out)
    else:
        _emit(polyline_csv(result), out)
    return EXIT_OK if result.closed else EXIT_INCONCLUSIVE


def contour(family: str, k: int, grid: int, out: Path | None = None) -> int:
    """
    Sample one eigenvalue branch of a two-parameter family on a grid as `x1,x2,lambda_k`
    CSV rows, for plotting eigenvalue surfaces.
    """
    from morseig.families.builtin_families import load_family
    from morseig.pipeline.contour import contour_csv, contour_rows

    fam = load_family(family)
    _emit(contour_csv(contour_rows(fam, k, grid)), out)
    return EXIT_OK
