"""Command line entry point: ``ordsurvey validate|evaluate|predict``.

Exit codes: 0 success, 2 input or schema error, 3 not enough data.
Settings come from built-in defaults, then an optional JSON config file
(``--config``), then command line flags, later sources winning.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from ordsurvey import __version__
from ordsurvey.dataset import LIKERT, Scale, check_csv, parse_dataset, split_labeled
from ordsurvey.errors import InputError, InsufficientData
from ordsurvey.kano import DEFAULT_TAU
from ordsurvey.ordeval import OrdEvalParams
from ordsurvey.plots import PALETTES, render_attribute_plot, render_summary_plot
from ordsurvey.predict import (
    DecisionTreeLearner,
    NaiveBayesLearner,
    TreeParams,
    cross_validate,
    rank_targets,
)
from ordsurvey.report import (
    SCHEMA_VERSION,
    build_report,
    canonical_json,
    cv_section,
    evaluate,
    ranking_section,
    write_report,
)
from ordsurvey.significance import SignificanceParams

log = logging.getLogger("ordsurvey")

EXIT_OK, EXIT_INPUT, EXIT_DATA = 0, 2, 3

DEFAULTS = {
    "response": None,
    "id_column": None,
    "default_scale": "1:5",
    "scales": {},
    "k": 10,
    "B": 200,
    "alpha": 0.05,
    "tau": DEFAULT_TAU,
    "seed": None,
    "folds": 10,
    "min_leaf": 2,
    "output_dir": "out",
    "palette": "standard",
}


@dataclass
class RunConfig:
    input: Path
    response: str
    id_column: str | None = None
    default_scale: Scale = LIKERT
    scales: dict[str, Scale] = field(default_factory=dict)
    k: int = 10
    B: int = 200
    alpha: float = 0.05
    tau: float = DEFAULT_TAU
    seed: int | None = None
    folds: int = 10
    min_leaf: int = 2
    output_dir: Path = Path("out")
    palette: str = "standard"

    def read_text(self) -> str:
        try:
            return self.input.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read {self.input}: {exc}") from exc

    def parse_kwargs(self) -> dict:
        return {"response": self.response, "scales": self.scales,
                "default_scale": self.default_scale, "id_column": self.id_column}


def _scale_overrides(items) -> dict[str, str]:
    out = {}
    for item in items or []:
        col, sep, rng = item.rpartition("=")
        if not sep or not col:
            raise InputError(f"bad --scale {item!r}, expected COLUMN=MIN:MAX")
        out[col] = rng
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the JSON config file and explicit flags into a :class:`RunConfig`."""
    merged = dict(DEFAULTS)
    merged["scales"] = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS) - {"input"}
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        merged.update({k: v for k, v in loaded.items() if k != "scales"})
        merged["scales"].update(loaded.get("scales") or {})
        if "input" in loaded and args.input is None:
            args.input = loaded["input"]
    for key in DEFAULTS:
        if key == "scales":
            continue
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    merged["scales"].update(_scale_overrides(args.scale))

    if args.input is None:
        raise InputError("no input file given")
    if not merged["response"]:
        raise InputError("no response column given (--response)")

    def as_scale(v):
        return Scale(*v) if isinstance(v, (list, tuple)) else Scale.parse(str(v))

    try:
        cfg = RunConfig(
            input=Path(args.input),
            response=merged["response"],
            id_column=merged["id_column"],
            default_scale=as_scale(merged["default_scale"]),
            scales={c: as_scale(v) for c, v in merged["scales"].items()},
            k=int(merged["k"]),
            B=int(merged["B"]),
            alpha=float(merged["alpha"]),
            tau=float(merged["tau"]),
            seed=None if merged["seed"] is None else int(merged["seed"]),
            folds=int(merged["folds"]),
            min_leaf=int(merged["min_leaf"]),
            output_dir=Path(merged["output_dir"]),
            palette=str(merged["palette"]),
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad configuration value: {exc}") from exc
    if cfg.palette not in PALETTES:
        raise InputError(f"unknown palette {cfg.palette!r}; choose from {sorted(PALETTES)}")
    if not 0 < cfg.tau < 1:
        raise InputError("tau must lie in (0, 1)")
    if cfg.folds < 2:
        raise InputError("folds must be at least 2")
    return cfg


def _require_seed(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise InputError("--seed is required for this command")
    return cfg.seed


def _safe_name(name: str, taken: set[str]) -> str:
    base = re.sub(r"[^A-Za-z0-9_.-]", "_", name) or "attribute"
    out, i = base, 2
    while out.lower() in taken:
        out = f"{base}_{i}"
        i += 1
    taken.add(out.lower())
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def run_validate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    diag = check_csv(cfg.read_text(), **cfg.parse_kwargs())
    print(f"rows: {diag.n_rows}", file=out)
    print(f"columns: {len(diag.attribute_names)} ({len(diag.attribute_names) - 1} attributes "
          f"+ response {cfg.response!r})", file=out)
    print("missing values per column:", file=out)
    for col in diag.attribute_names:
        print(f"  {col}: {diag.missing[col]}", file=out)
    print("answer counts per value:", file=out)
    for col in diag.attribute_names:
        counts = " ".join(f"{v}:{c}" for v, c in diag.value_counts[col].items())
        print(f"  {col}: {counts}", file=out)
    unused = diag.unused_values()
    if unused:
        print("values never used:", file=out)
        for col, vals in unused.items():
            print(f"  {col}: {', '.join(str(v) for v in vals)}", file=out)
    if diag.violations:
        print(f"schema violations: {len(diag.violations)}", file=out)
        for v in diag.violations:
            print(f"  {v}", file=out)
        return EXIT_INPUT
    print("schema violations: 0", file=out)
    return EXIT_OK


def run_evaluate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    seed = _require_seed(cfg)
    ds = parse_dataset(cfg.read_text(), **cfg.parse_kwargs())
    labeled, _ = split_labeled(ds)
    if labeled.n < 2:
        raise InsufficientData(f"evaluation needs at least 2 labeled rows, got {labeled.n}")
    log.info("evaluating %d labeled rows, %d attributes, B=%d", labeled.n, labeled.n_attributes, cfg.B)
    ev = evaluate(labeled, OrdEvalParams(cfg.k), SignificanceParams(cfg.B, cfg.alpha, seed), cfg.tau)
    report = build_report(ev)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _write(cfg.output_dir / "report.json", write_report(report))
    _write(cfg.output_dir / "summary.svg", render_summary_plot(report, cfg.palette))
    taken: set[str] = {"report.json", "summary"}
    for name in labeled.attribute_names:
        fname = "attribute_" + _safe_name(name, taken) + ".svg"
        _write(cfg.output_dir / fname, render_attribute_plot(report, name, cfg.palette))
    for name, label in ev.labels.items():
        print(f"{name}: {label.value}", file=out)
    print(f"wrote report.json, summary.svg and {labeled.n_attributes} attribute plots to {cfg.output_dir}",
          file=out)
    return EXIT_OK


def run_predict(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    seed = _require_seed(cfg)
    ds = parse_dataset(cfg.read_text(), **cfg.parse_kwargs())
    labeled, unlabeled = split_labeled(ds)
    if labeled.n < cfg.folds:
        raise InsufficientData(f"{cfg.folds}-fold cross-validation needs at least {cfg.folds} "
                               f"labeled rows, got {labeled.n}")
    log.info("%d labeled rows, %d unlabeled rows", labeled.n, unlabeled.n)
    learners = [NaiveBayesLearner(), DecisionTreeLearner(TreeParams(min_leaf=cfg.min_leaf))]
    reports = {lr.name: cross_validate(labeled, lr, cfg.folds, seed) for lr in learners}
    # higher within-one accuracy wins; max() keeps the first (naive Bayes) on ties
    best = max(learners, key=lambda lr: reports[lr.name].within_one_accuracy)
    model = best.fit(labeled)
    ranking = rank_targets(model, unlabeled)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _write(cfg.output_dir / "cv_report.json",
           canonical_json({"schema_version": SCHEMA_VERSION, **cv_section(reports, best.name)}))
    _write(cfg.output_dir / "ranking.json",
           canonical_json({"schema_version": SCHEMA_VERSION, **ranking_section(ranking, best.name)}))
    for name, r in reports.items():
        print(f"{name}: exact {r.exact_accuracy:.3f}, within-one {r.within_one_accuracy:.3f}", file=out)
    print(f"majority baseline: {reports[best.name].majority_baseline:.3f}", file=out)
    print(f"ranking {len(ranking)} unlabeled rows with {best.name}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordsurvey",
        description="Ordinal survey analysis: reinforcement factors, Kano types, prediction.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("input")
    g.add_argument("input", nargs="?", help="CSV file (comma separated, header row, empty cell = missing)")
    g.add_argument("--config", help="JSON config file; flags override its values")
    g.add_argument("--response", help="name of the ordinal response column (required)")
    g.add_argument("--id-column", dest="id_column", help="column holding row identifiers (default: row numbers)")
    g.add_argument("--default-scale", dest="default_scale", metavar="MIN:MAX",
                   help="scale of every column without an explicit --scale "
                        "(default: 1:5, the five-point Likert agreement scale)")
    g.add_argument("--scale", action="append", metavar="COLUMN=MIN:MAX",
                   help="scale of one column; repeatable")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--output-dir", dest="output_dir", help="directory for all outputs (default: out)")
    out.add_argument("--seed", type=int, help="random seed (required; no clock-based default)")

    sub.add_parser("validate", parents=[common], help="check a CSV file against its scales",
                   description="Report schema violations, missingness and per-value answer counts.")

    ev = sub.add_parser("evaluate", parents=[common, out], help="reinforcement factors, boxes, Kano labels",
                        description="Write report.json, summary.svg and one SVG per attribute.")
    ev.add_argument("--k", type=int, help="neighbors per respondent (default: 10, clamped to n-1)")
    ev.add_argument("--B", type=int, help="permutation resamples for the null boxes (default: 200, min 20)")
    ev.add_argument("--alpha", type=float,
                    help="significance level; whiskers at the alpha/2 and 1-alpha/2 percentiles "
                         "(default: 0.05, i.e. 95%% intervals)")
    ev.add_argument("--tau", type=float,
                    help="minimum reinforcement factor for a non-negligible effect (default: 0.6)")
    ev.add_argument("--palette", choices=sorted(PALETTES),
                    help="bar colors: standard = red up / blue down (default: standard)")

    pr = sub.add_parser("predict", parents=[common, out], help="cross-validate learners, rank unlabeled rows",
                        description="Write cv_report.json and ranking.json.")
    pr.add_argument("--folds", type=int, help="cross-validation folds (default: 10)")
    pr.add_argument("--min-leaf", dest="min_leaf", type=int, help="decision tree minimum leaf size (default: 2)")
    return parser


COMMANDS = {"validate": run_validate, "evaluate": run_evaluate, "predict": run_predict}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except InsufficientData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
