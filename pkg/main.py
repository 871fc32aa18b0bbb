"""Wind-speed distribution fitting: command-line entry point.

Fits the Lindley-based and reference families to tower wind speeds and
writes report tables, plot data and a manifest for each run.

Usage:
    python main.py describe --input m2.csv --height 80 --years 2015
    python main.py fit --input m2.csv --height 10 --years 2010-2020 --families all
    python main.py percentiles --input m2.csv --height 80 --levels 0.95,0.99
    python main.py plotdata --input m2.csv --height 10 --bins 60
    python main.py sample --family L --params 1 --n 1000 --seed 7
    python main.py fit --manifest outputs/manifest.txt
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import config
from distributions import FAMILIES, FAMILY_ORDER, Family, make_spec
from distributions import sample as draw_sample
from fitting import FitConfig, FitResult, fit_mle
from fitting.starts import NESTING
from gof import evaluate, percentile_bias
from ingest.cleaning import clean, parse_years
from ingest.describe import describe
from ingest.parser import CleaningLog, ColumnMapping, parse_csv
from ingest.sample import Sample, read_sample, write_sample
from output.manifest import RunManifest, read_manifest
from output.plotdata import write_density_grid, write_histogram
from output import report
from utils.errors import DomainError, WindFitError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DEGRADED = 1
EXIT_ERROR = 2

COMMANDS = ("describe", "fit", "percentiles", "plotdata", "sample")

# Families are fitted bottom-up so every parent finds its submodels done
FIT_WAVES: List[List[Family]] = [
    [Family.L, Family.W, Family.BE, Family.GAM, Family.LOGN],
    [Family.GL, Family.BL, Family.BW],
    [Family.BGL],
]

DEFAULTS: Dict[str, str] = {
    "height": "10",
    "years": f"{config.DEFAULT_YEARS[0]}-{config.DEFAULT_YEARS[1]}",
    "families": "all",
    "seed": str(config.FIT_SEED),
    "out": config.OUTPUT_DIR,
    "fast": "false",
    "subsample_size": str(config.FAST_SUBSAMPLE_SIZE),
    "levels": ",".join(str(v) for v in config.PERCENTILE_LEVELS),
    "bins": str(config.PLOT_BINS),
    "percentile_rule": config.PERCENTILE_RULE,
    "workers": str(config.FIT_WORKERS),
    "max_iterations": str(config.FIT_MAX_ITERATIONS),
    "gradient_tolerance": repr(config.FIT_GRADIENT_TOLERANCE),
    "n_starts": str(config.FIT_N_STARTS),
    "optimizer": config.FIT_OPTIMIZER,
}

_DATA_KEYS = ["input", "height", "years", "fast", "subsample_size", "seed"]
_FIT_KEYS = ["families", "max_iterations", "gradient_tolerance", "n_starts", "optimizer", "workers"]

# Settings each command resolves and records, in manifest order
COMMAND_KEYS: Dict[str, List[str]] = {
    "describe": ["config", "out"] + _DATA_KEYS + ["percentile_rule"],
    "fit": ["config", "out"] + _DATA_KEYS + _FIT_KEYS,
    "percentiles": ["config", "out"] + _DATA_KEYS + _FIT_KEYS + ["levels", "percentile_rule"],
    "plotdata": ["config", "out"] + _DATA_KEYS + _FIT_KEYS + ["bins", "percentile_rule"],
    "sample": ["out", "family", "params", "n", "seed"],
}


# ──────────────────── Argument parsing ────────────────────

def family_listing() -> str:
    """One line per family: name, parameters and form."""
    lines = ["families:"]
    for fam in FAMILY_ORDER:
        definition = FAMILIES[fam]
        lines.append(f"  {fam.value:<5} ({', '.join(definition.param_names)})  {definition.description}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    # Every option defaults to None so "not given" is distinguishable from a value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"Output directory (default {config.OUTPUT_DIR})")
    common.add_argument("--seed", help="Seed for starts, subsampling and draws")
    common.add_argument("--manifest", help="Re-run a previously written manifest.txt")
    common.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING"], default="INFO",
        help="Logging level",
    )

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="Tower CSV export or one-value-per-line sample file")
    data.add_argument("--height", help="Measurement height in metres (default 10)")
    data.add_argument("--years", help="Year or inclusive range, e.g. 2015 or 2010-2020")
    data.add_argument("--config", help="key=value file with column mapping and fit settings")
    data.add_argument("--fast", action="store_true", default=None,
                      help="Deterministically subsample to a smaller sample for smoke runs")
    data.add_argument("--subsample-size", dest="subsample_size", help="Subsample size for --fast")

    fitting = argparse.ArgumentParser(add_help=False)
    fitting.add_argument("--families", help="Comma-separated families or 'all'")
    fitting.add_argument("--workers", help="Threads for concurrent fits and starts")

    rule = argparse.ArgumentParser(add_help=False)
    rule.add_argument("--percentile-rule", dest="percentile_rule", choices=["type7", "step"],
                      help="Empirical percentile convention")

    listing = {"epilog": family_listing(), "formatter_class": argparse.RawDescriptionHelpFormatter}

    parser = argparse.ArgumentParser(description="Wind-speed distribution fitting")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("describe", parents=[common, data, rule], help="Descriptive statistics of a slice")
    sub.add_parser("fit", parents=[common, data, fitting], help="Fit families and score them", **listing)
    p_pct = sub.add_parser("percentiles", parents=[common, data, fitting, rule],
                           help="Observed vs fitted percentiles", **listing)
    p_pct.add_argument("--levels", help="Comma-separated levels in (0, 1)")
    p_plot = sub.add_parser("plotdata", parents=[common, data, fitting, rule],
                            help="Histogram and fitted density grids as CSV", **listing)
    p_plot.add_argument("--bins", help="Histogram bins (>= 2)")
    p_sample = sub.add_parser("sample", parents=[common], help="Seeded draws from a family", **listing)
    p_sample.add_argument("--family", help="Family name, e.g. BGL")
    p_sample.add_argument("--params", help="Comma-separated parameters in (alpha, lambda, a, b) order")
    p_sample.add_argument("--n", help="Number of draws")
    return parser


def resolve_settings(args: argparse.Namespace) -> Tuple[Dict[str, str], Dict[str, str]]:
    """Merge explicit flags > manifest > config file > defaults.

    Returns (settings, config_file_values); settings hold the strings the
    CLI accepts so they can be written back to a manifest unchanged.
    """
    keys = COMMAND_KEYS[args.command]
    manifest: Dict[str, str] = {}
    if getattr(args, "manifest", None):
        manifest = read_manifest(args.manifest)
        recorded = manifest.get("command")
        if recorded and recorded != args.command:
            log.warning(f"Manifest was written by '{recorded}', running '{args.command}'")

    def explicit(key: str) -> Optional[str]:
        value = getattr(args, key, None)
        if value is None:
            return None
        return "true" if value is True else str(value)

    config_path = explicit("config") or manifest.get("config")
    file_values = config.load_config_file(config_path) if "config" in keys else {}

    settings: Dict[str, str] = {}
    for key in keys:
        for source in (explicit(key), manifest.get(key), file_values.get(key), DEFAULTS.get(key)):
            if source is not None:
                settings[key] = source
                break
    if config_path and "config" in keys:
        settings["config"] = config_path
    return settings, file_values


# ──────────────────── Setting converters ────────────────────

def _as_bool(text: str) -> bool:
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _as_int(settings: Dict[str, str], key: str) -> int:
    try:
        return int(settings[key])
    except (KeyError, ValueError) as exc:
        raise DomainError(f"--{key.replace('_', '-')} must be an integer, got {settings.get(key)!r}") from exc


def _as_floats(text: str, name: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise DomainError(f"--{name} must be comma-separated numbers, got {text!r}") from exc


def parse_families(text: str) -> List[Family]:
    if text.strip().lower() == "all":
        return list(FAMILY_ORDER)
    families: List[Family] = []
    for name in text.split(","):
        if not name.strip():
            continue
        fam = Family.parse(name)
        if fam not in families:
            families.append(fam)
    if not families:
        raise DomainError("at least one family must be requested")
    return families


def parse_levels(text: str) -> List[float]:
    levels = _as_floats(text, "levels")
    if not levels or any(not 0.0 < v < 1.0 for v in levels):
        raise DomainError(f"--levels must lie strictly inside (0, 1), got {text!r}")
    return levels


def fit_config(settings: Dict[str, str]) -> FitConfig:
    try:
        gradient_tolerance = float(settings["gradient_tolerance"])
    except ValueError as exc:
        raise DomainError(f"gradient_tolerance must be a number, got {settings['gradient_tolerance']!r}") from exc
    return FitConfig(
        max_iterations=_as_int(settings, "max_iterations"),
        gradient_tolerance=gradient_tolerance,
        n_starts=_as_int(settings, "n_starts"),
        seed=_as_int(settings, "seed"),
        optimizer=settings["optimizer"],
        workers=_as_int(settings, "workers"),
    )


# ──────────────────── Data loading ────────────────────

def _looks_like_values_file(path: str) -> bool:
    try:
        with open(path, encoding="utf-8-sig") as f:
            for line in f:
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                try:
                    float(text)
                    return True
                except ValueError:
                    return False
    except OSError:
        return False  # parse_csv reports the open error with the path
    return False


def load_sample(settings: Dict[str, str], file_values: Dict[str, str]) -> Tuple[Sample, Optional[CleaningLog]]:
    path = settings.get("input")
    if not path:
        raise DomainError("--input is required")
    height = _as_int(settings, "height")
    years = parse_years(settings["years"])

    if _looks_like_values_file(path):
        print(f"Reading preprocessed sample {path}...")
        sample, clean_log = read_sample(path, height, years), None
    else:
        print(f"Reading tower export {path} ({height} m, {report.years_label(years)})...")
        mapping = ColumnMapping.from_config(file_values)
        records, parse_log = parse_csv(path, mapping, heights=[height])
        sample, clean_log = clean(records, height, years, mapping.sentinel, parse_log, source=path)

    if _as_bool(settings["fast"]):
        size = _as_int(settings, "subsample_size")
        if size < 1:
            raise DomainError(f"subsample size must be >= 1, got {size}")
        sample = sample.subsample(size, _as_int(settings, "seed"))
        print(f"  --fast: subsampled to {sample.n} values")
    print(f"  {sample.n} wind speeds loaded.")
    return sample, clean_log


# ──────────────────── Fitting ────────────────────

def _with_submodels(families: Sequence[Family]) -> set:
    needed = set()
    pending = list(families)
    while pending:
        fam = pending.pop()
        if fam not in needed:
            needed.add(fam)
            pending.extend(NESTING.get(fam, []))
    return needed


def fit_families(families: Sequence[Family], sample: Sample, cfg: FitConfig) -> Dict[Family, FitResult]:
    """Fit the requested families plus any submodels they are seeded from."""
    needed = _with_submodels(families)
    fitted: Dict[Family, FitResult] = {}
    for wave in FIT_WAVES:
        todo = [fam for fam in wave if fam in needed]
        if not todo:
            continue
        print(f"Fitting {', '.join(f.value for f in todo)}...")
        if cfg.workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=min(cfg.workers, len(todo))) as pool:
                results = list(pool.map(lambda fam: fit_mle(fam, sample, cfg, fitted), todo))
        else:
            results = [fit_mle(fam, sample, cfg, fitted) for fam in todo]
        for fam, result in zip(todo, results):
            fitted[fam] = result
    return {fam: fitted[fam] for fam in families}


def score_fits(results: Dict[Family, FitResult], sample: Sample) -> Dict:
    reports = {}
    for fam, result in results.items():
        try:
            reports[fam] = evaluate(result.spec, sample, result.neg2_log_lik)
        except WindFitError as exc:
            log.warning(f"{fam.value}: goodness-of-fit failed: {exc}")
            result.converged = False
    return reports


def _fit_status(results: Dict[Family, FitResult], clean_log: Optional[CleaningLog]) -> int:
    unconverged = [fam.value for fam, r in results.items() if not r.converged]
    if unconverged:
        print(f"  WARNING: not converged: {', '.join(unconverged)}")
    return _status(clean_log, bool(unconverged))


def _status(clean_log: Optional[CleaningLog], degraded: bool = False) -> int:
    if clean_log is not None and clean_log.malformed_rows:
        print(f"  WARNING: {clean_log.malformed_rows} malformed rows skipped")
        degraded = True
    return EXIT_DEGRADED if degraded else EXIT_OK


# ──────────────────── Commands ────────────────────

def cmd_describe(settings: Dict[str, str], file_values: Dict[str, str]) -> int:
    sample, clean_log = load_sample(settings, file_values)
    stats = describe(sample, settings["percentile_rule"])
    row = report.describe_row(stats, sample.height_m, sample.year_range)
    report.write_report(settings["out"], "describe", "DESCRIPTIVE STATISTICS", report.DESCRIBE_COLUMNS,
                        [row], report.cleaning_notes(clean_log))
    return _status(clean_log)


def cmd_fit(settings: Dict[str, str], file_values: Dict[str, str]) -> int:
    sample, clean_log = load_sample(settings, file_values)
    families = parse_families(settings["families"])
    results = fit_families(families, sample, fit_config(settings))
    reports = score_fits(results, sample)
    rows = report.fit_rows([results[f] for f in families], reports)
    title = f"FIT SUMMARY  (n = {sample.n})"
    report.write_report(settings["out"], "fit", title, report.FIT_COLUMNS, rows)
    return _fit_status(results, clean_log)


def cmd_percentiles(settings: Dict[str, str], file_values: Dict[str, str]) -> int:
    levels = parse_levels(settings["levels"])
    sample, clean_log = load_sample(settings, file_values)
    families = parse_families(settings["families"])
    results = fit_families(families, sample, fit_config(settings))
    rule = settings["percentile_rule"]
    biases = {}
    for fam in families:
        try:
            biases[fam] = [percentile_bias(results[fam].spec, sample, level, rule) for level in levels]
        except WindFitError as exc:
            log.warning(f"{fam.value}: percentile evaluation failed: {exc}")
            results[fam].converged = False
    sort_level = 0.95 if any(abs(v - 0.95) < 1e-12 for v in levels) else levels[0]
    rows = report.percentile_rows(biases, sort_level)
    report.write_report(settings["out"], "percentiles", "PERCENTILE BIAS  (est - obs)",
                        report.PERCENTILE_COLUMNS, rows)
    return _fit_status(results, clean_log)


def cmd_plotdata(settings: Dict[str, str], file_values: Dict[str, str]) -> int:
    bins = _as_int(settings, "bins")
    if bins < 2:
        raise DomainError(f"--bins must be >= 2, got {bins}")
    sample, clean_log = load_sample(settings, file_values)
    families = parse_families(settings["families"])
    results = fit_families(families, sample, fit_config(settings))
    out = settings["out"]
    hist_path = write_histogram(sample, out, bins)
    grid_path = write_density_grid(sample, [results[f].spec for f in families], out,
                                   rule=settings["percentile_rule"])
    print(f"  Histogram: {hist_path}")
    print(f"  Density grid: {grid_path}")
    return _fit_status(results, clean_log)


def cmd_sample(settings: Dict[str, str], file_values: Dict[str, str]) -> int:
    for key in ("family", "params", "n"):
        if not settings.get(key):
            raise DomainError(f"--{key} is required for sample")
    spec = make_spec(settings["family"], _as_floats(settings["params"], "params"))
    n = _as_int(settings, "n")
    if n < 1:
        raise DomainError(f"--n must be >= 1, got {n}")
    draws = draw_sample(spec, n, _as_int(settings, "seed"))
    path = write_sample(draws, os.path.join(settings["out"], "sample.txt"))
    print(f"  {n} draws from {spec} written to {path}")
    return EXIT_OK


HANDLERS = {
    "describe": cmd_describe,
    "fit": cmd_fit,
    "percentiles": cmd_percentiles,
    "plotdata": cmd_plotdata,
    "sample": cmd_sample,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    # --- Setup logging ---
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
        datefmt="%H:%M:%S",
    )

    try:
        settings, file_values = resolve_settings(args)
        manifest = RunManifest(args.command)
        for key in COMMAND_KEYS[args.command]:
            manifest.record(key, settings.get(key))
        status = HANDLERS[args.command](settings, file_values)
        manifest_path = manifest.save(settings["out"])
        print(f"  Manifest: {manifest_path}")
    except (WindFitError, FileNotFoundError) as exc:
        kind = exc.kind if isinstance(exc, WindFitError) else "ingest"
        print(f"Error ({kind}): {exc}", file=sys.stderr)
        return EXIT_ERROR
    return status


if __name__ == "__main__":
    sys.exit(main())
