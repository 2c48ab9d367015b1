"""``behavdt`` command line.

Exit codes: 0 success, 1 usage error, 2 data or model error. Outputs are
written to a temporary file and renamed into place only on success.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import yaml

from . import __version__
from .baselines import TRADITIONAL_DT, ZERO_R, build_traditional_dt, build_zero_r
from .dataset import (
    MISSING,
    DiscretizationConfig,
    discretize,
    dumps_csv,
    generate_synthetic,
    load_csv,
    load_planted_spec,
    load_raw_log,
)
from .errors import BehavDTError
from .evaluation import (
    BEHAVDT,
    compare_models,
    comparison_tsv,
    confidence_sweep,
    cross_validate,
    report_json,
    report_tsv,
    sweep_tsv,
)
from .learner import ANY_DEVIATION, MAJORITY_DEVIATION, LearnerConfig, build_tree
from .model import Model, deserialize, export_dot, export_rules, predict, serialize

log = logging.getLogger("behavdt")

POLICY_FLAGS = {"majority": MAJORITY_DEVIATION, "any": ANY_DEVIATION}
KIND_FLAGS = {"behavdt": BEHAVDT, "dt": TRADITIONAL_DT, "zeror": ZERO_R}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2; usage errors are 1 here
        raise UsageError(f"{self.prog}: {message}\n\n{self.format_usage()}")


def parse_fraction(text: str, flag: str = "--threshold") -> float:
    """``0.8`` and ``80`` both mean 80%; values above 1 are percentages."""
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"{flag}: not a number: {text!r}") from None
    if value > 1.0:
        value /= 100.0
    if not 0.0 <= value <= 1.0:
        raise UsageError(f"{flag}: {text} is outside [0, 1] (or 0-100%)")
    return value


def parse_fraction_list(text: str, flag: str = "--thresholds") -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError(f"{flag}: no values given")
    return [parse_fraction(p.strip(), flag) for p in parts]


def _fraction(text: str) -> float:
    try:
        return parse_fraction(text, "value")
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc).removeprefix("value: ")) from None


def _fraction_list(text: str) -> list[float]:
    try:
        return parse_fraction_list(text, "value")
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc).removeprefix("value: ")) from None


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="behavdt", description="Behavioral decision tree learner")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen", help="generate a synthetic dataset from a planted-rule spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the seed in the spec file")

    p = sub.add_parser("train", help="train and save a model")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=_fraction, default="0.8")
    p.add_argument("--policy", choices=sorted(POLICY_FLAGS), default="majority")
    p.add_argument("--max-depth", type=_positive, default=None)
    p.add_argument("--baseline", choices=["dt", "zeror"], default=None)

    p = sub.add_parser("predict", help="batch predictions with source decision nodes")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)

    def add_eval_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--data", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--k", type=_positive, default=10)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--policy", choices=sorted(POLICY_FLAGS), default="majority")
        p.add_argument("--jobs", type=_positive, default=1)

    p = sub.add_parser("evaluate", help="k-fold cross-validated metrics")
    add_eval_flags(p)
    p.add_argument("--model-kind", choices=sorted(KIND_FLAGS), default="behavdt")
    p.add_argument("--threshold", type=_fraction, default="0.8")
    p.add_argument("--stratified", action="store_true")
    p.add_argument("--json", default=None, help="also write the report as JSON")

    p = sub.add_parser("sweep", help="metrics and node counts across confidence thresholds")
    add_eval_flags(p)
    p.add_argument("--thresholds", type=_fraction_list, default="1.0,0.9,0.8,0.7,0.6")

    p = sub.add_parser("compare", help="ZeroR vs traditional DT vs BehavDT")
    add_eval_flags(p)
    p.add_argument("--threshold", type=_fraction, default="0.8")

    p = sub.add_parser("export", help="render a saved model as DOT or rules")
    p.add_argument("--model", required=True)
    p.add_argument("--format", choices=["dot", "rules"], required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("discretize", help="turn a raw call log into a categorical dataset")
    p.add_argument("--log", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    return parser


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_model(path: str) -> Model:
    return deserialize(Path(path).read_text(encoding="utf-8"))


def _read_for_model(path: str, model: Model) -> tuple[list[tuple[str, ...]], list[str] | None]:
    """Rows in model schema order; labels only if the class column exists."""
    schema = model.schema
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    while rows and not rows[-1]:
        rows.pop()
    if not rows:
        raise BehavDTError("empty CSV file")
    header = [h.strip() for h in rows[0]]
    missing = [n for n in schema.names if n not in header]
    if missing:
        raise BehavDTError(f"CSV lacks model attributes {missing}")
    cols = [header.index(n) for n in schema.names]
    label_col = header.index(schema.class_attribute) if schema.class_attribute in header else None
    values, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise BehavDTError(f"row {lineno}: expected {len(header)} columns, got {len(row)}")
        values.append(tuple(row[c].strip() or MISSING for c in cols))
        if label_col is not None:
            labels.append(row[label_col].strip())
    return values, (labels if label_col is not None else None)


def _cmd_gen(args) -> None:
    spec = load_planted_spec(args.spec)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    write_atomic(args.out, dumps_csv(generate_synthetic(spec)))


def _cmd_train(args) -> None:
    data = load_csv(args.data)
    if args.baseline == "dt":
        model: Model = build_traditional_dt(data)
    elif args.baseline == "zeror":
        model = build_zero_r(data)
    else:
        config = LearnerConfig(args.threshold, POLICY_FLAGS[args.policy], args.max_depth)
        model = build_tree(data, config)
    log.info("trained %s on %d instances", model.kind, len(data))
    write_atomic(args.model, serialize(model))


def _cmd_predict(args) -> None:
    model = _load_model(args.model)
    values, labels = _read_for_model(args.data, model)
    header = ["row", "predicted", "source_node", "depth", "fallback_used"]
    if labels is not None:
        header.append("actual")
    lines = ["\t".join(header)]
    for i, vals in enumerate(values):
        pred = predict(model, vals)
        cells = [str(i + 1), pred.label, str(pred.source_node), str(pred.depth), str(pred.fallback_used).lower()]
        if labels is not None:
            cells.append(labels[i])
        lines.append("\t".join(cells))
    write_atomic(args.out, "\n".join(lines) + "\n")


def _cmd_evaluate(args) -> None:
    config = LearnerConfig(args.threshold, POLICY_FLAGS[args.policy])
    data = load_csv(args.data)
    report = cross_validate(
        data, KIND_FLAGS[args.model_kind], config, args.k, args.seed,
        stratified=args.stratified, n_jobs=args.jobs,
    )
    log.info("pooled accuracy %.4f", report.accuracy)
    if args.json:
        write_atomic(args.json, report_json(report))
    write_atomic(args.out, report_tsv(report))


def _cmd_sweep(args) -> None:
    data = load_csv(args.data)
    result = confidence_sweep(
        data, args.thresholds, args.k, args.seed, POLICY_FLAGS[args.policy], n_jobs=args.jobs
    )
    write_atomic(args.out, sweep_tsv(result))


def _cmd_compare(args) -> None:
    config = LearnerConfig(args.threshold, POLICY_FLAGS[args.policy])
    data = load_csv(args.data)
    rows = compare_models(data, config, args.k, args.seed, n_jobs=args.jobs)
    write_atomic(args.out, comparison_tsv(rows))


def _cmd_export(args) -> None:
    model = _load_model(args.model)
    text = export_dot(model) if args.format == "dot" else export_rules(model)
    write_atomic(args.out, text)


def _cmd_discretize(args) -> None:
    with open(args.config, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise BehavDTError(f"{args.config}: expected a mapping")
    config = DiscretizationConfig.from_mapping(doc)
    write_atomic(args.out, dumps_csv(discretize(load_raw_log(args.log), config)))


COMMANDS = {
    "gen": _cmd_gen,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "export": _cmd_export,
    "discretize": _cmd_discretize,
}


def _setup_logging() -> None:
    level = os.environ.get("BEHAVDT_LOG", "off").lower()
    levels = {"off": logging.CRITICAL + 1, "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(levels.get(level, logging.CRITICAL + 1))


def run(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    try:
        COMMANDS[args.command](args)
    except UsageError:
        raise
    except (BehavDTError, OSError) as exc:
        print(f"behavdt {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
