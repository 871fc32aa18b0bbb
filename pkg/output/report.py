import csv
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from distributions.families import FAMILIES
from fitting.mle import FitResult
from gof.metrics import GofReport, PercentileBias
from ingest.describe import Descriptives
from ingest.parser import CleaningLog

# Parameter columns in table order; families fill their own subset
PARAM_COLUMNS = ("alpha", "lambda", "a", "b")


@dataclass
class Column:
    key: str
    header: str
    fmt: str = ""  # format spec for the text table; CSV keeps full precision


def _cell(value, fmt: str) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    return format(value, fmt) if fmt else str(value)


def render_table(title: str, columns: Sequence[Column], rows: Sequence[Dict],
                 notes: Sequence[str] = ()) -> str:
    """Aligned plain-text table framed by banner lines."""
    cells = [[_cell(row.get(c.key), c.fmt) for c in columns] for row in rows]
    widths = [
        max([len(c.header)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)
    ]
    width = max(50, sum(widths) + 2 * (len(widths) - 1) + 4)

    lines = ["=" * width]
    lines.append(f"  {title}")
    lines.append("=" * width)
    header = "  ".join(c.header.rjust(w) if c.fmt else c.header.ljust(w) for c, w in zip(columns, widths))
    lines.append(f"  {header}")
    lines.append("-" * width)
    for r in cells:
        body = "  ".join(
            text.rjust(w) if c.fmt else text.ljust(w) for text, c, w in zip(r, columns, widths)
        )
        lines.append(f"  {body}")
    if notes:
        lines.append("-" * width)
        lines.extend(f"  {note}" for note in notes)
    lines.append("=" * width)
    return "\n".join(lines) + "\n"


def write_csv(path: str, columns: Sequence[Column], rows: Sequence[Dict]) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow([c.key for c in columns])
        for row in rows:
            writer.writerow(["" if row.get(c.key) is None else row.get(c.key) for c in columns])
    return path


def write_report(output_dir: str, name: str, title: str, columns: Sequence[Column],
                 rows: Sequence[Dict], notes: Sequence[str] = ()) -> Tuple[str, str]:
    """Write ``<name>.csv`` and ``<name>.txt`` and echo the table."""
    os.makedirs(output_dir, exist_ok=True)
    csv_path = write_csv(os.path.join(output_dir, f"{name}.csv"), columns, rows)
    text = render_table(title, columns, rows, notes)
    txt_path = os.path.join(output_dir, f"{name}.txt")
    with open(txt_path, "w", encoding="utf-8") as f:
        f.write(text)
    print(text)
    return csv_path, txt_path


# ──────────────────── Table layouts ────────────────────

DESCRIBE_COLUMNS = [
    Column("height_m", "Height"),
    Column("years", "Years"),
    Column("n", "n", "d"),
    Column("min", "Min", ".2f"),
    Column("max", "Max", ".2f"),
    Column("median", "Median", ".2f"),
    Column("mean", "Mean", ".2f"),
    Column("variance", "Variance", ".2f"),
    Column("skewness", "Skewness", ".2f"),
    Column("kurtosis", "Kurtosis", ".2f"),
    Column("p95", "95th", ".2f"),
    Column("p99", "99th", ".2f"),
]

FIT_COLUMNS = [
    Column("family", "Dist."),
    *[Column(p, p, ".3f") for p in PARAM_COLUMNS],
    Column("neg2_log_lik", "-2ln(L)", ".1f"),
    Column("aic", "AIC", ".1f"),
    Column("bic", "BIC", ".1f"),
    Column("ks", "KS", ".3f"),
    Column("ad", "AD", ".2f"),
    Column("converged", "Conv."),
]

PERCENTILE_COLUMNS = [
    Column("family", "Dist."),
    Column("level", "Level", ".2f"),
    Column("observed", "Obs", ".2f"),
    Column("estimated", "Est", ".2f"),
    Column("bias", "Bias", ".2f"),
]


def years_label(years: Optional[Tuple[int, int]]) -> str:
    if not years:
        return ""
    return str(years[0]) if years[0] == years[1] else f"{years[0]}-{years[1]}"


def describe_row(stats: Descriptives, height_m: Optional[int], years) -> Dict:
    row = stats.as_dict()
    row["height_m"] = "" if height_m is None else f"{height_m} m"
    row["years"] = years_label(years)
    return row


def cleaning_notes(clean_log: Optional[CleaningLog]) -> List[str]:
    if clean_log is None:
        return []
    return [
        f"rows read {clean_log.rows_read}, kept {clean_log.rows_kept}",
        f"duplicates removed {clean_log.duplicates_removed}, sentinel rows removed {clean_log.sentinel_rows_removed}",
        f"out of range {clean_log.out_of_range_rows}, missing {clean_log.missing_rows_removed}, "
        f"non-positive {clean_log.nonpositive_rows_removed}, malformed {clean_log.malformed_rows}",
    ]


def fit_row(result: FitResult, gof: Optional[GofReport]) -> Dict:
    fam = FAMILIES[result.family]
    row: Dict = {"family": result.family.value}
    for name, value in zip(fam.param_names, result.spec.params):
        row[name] = value
    row["neg2_log_lik"] = result.neg2_log_lik
    if gof is not None:
        row.update(aic=gof.aic, bic=gof.bic, ks=gof.ks, ad=gof.ad)
    row["converged"] = result.converged
    return row


def fit_rows(results: Sequence[FitResult], reports: Dict) -> List[Dict]:
    """Rows sorted ascending by -2ln(L); ties keep request order."""
    ordered = sorted(results, key=lambda r: r.neg2_log_lik)
    return [fit_row(r, reports.get(r.family)) for r in ordered]


def percentile_rows(biases: Dict, sort_level: float = 0.95) -> List[Dict]:
    """Rows grouped by family, families ordered by |bias| at ``sort_level``."""
    def key(item):
        _, entries = item
        at_level = [b for b in entries if abs(b.level - sort_level) < 1e-12]
        ranked = at_level[0] if at_level else entries[0]
        return abs(ranked.bias)

    rows: List[Dict] = []
    for family, entries in sorted(biases.items(), key=key):
        for b in entries:
            rows.append(_percentile_row(family, b))
    return rows


def _percentile_row(family, b: PercentileBias) -> Dict:
    return {
        "family": family.value,
        "level": b.level,
        "observed": b.observed,
        "estimated": b.estimated,
        "bias": b.bias,
    }
