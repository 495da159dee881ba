"""Command-line interface.

Exit status: 0 on success, 1 on specification or data errors, 2 when
``--strict`` is given and some node failed to reach feasibility.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import (
    ExperimentSpec,
    emit_reports,
    exact_mcnemar_pvalue,
    mcnemar_tally,
    mcnemar_test,
    run_learning_curve,
)
from .classify import export_predictions, make_classifier
from .constraints import DEFAULT_FEASIBILITY_TOL, MAX_EPSILON, generate_constraints, is_feasible
from .data import (
    DiscreteDataset,
    discretize,
    drop_incomplete,
    infer_recipe,
    load_corpus,
    load_table,
    parse_qualitative_model,
)
from .data.corpus import RECIPES
from .data.dsl import AUTO
from .estimation import FitConfig, count_stats, cpts_to_dict, fit_network, mle_theta
from .exceptions import MonobayesError

logger = logging.getLogger("monobayes")

EXIT_OK, EXIT_ERROR, EXIT_NONCONVERGED = 0, 1, 2


def _auto_cardinalities(model_text: str, data_path: Path) -> dict[str, int]:
    """For ``auto`` variables read from coded data: one more than the largest code."""
    if AUTO not in model_text:
        return {}
    with open(data_path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = np.array([[int(c) for c in row] for row in reader if row], dtype=np.int64)
    rows = rows.reshape(-1, len(header))
    return {h: max(int(rows[:, i].max()) + 1 if len(rows) else 2, 2)
            for i, h in enumerate(header)}


def _load_inputs(args):
    """(dataset, model) from either --corpus/--bins or --data/--model."""
    if args.corpus:
        entry = load_corpus(args.corpus, args.bins)
        return entry.dataset, entry.model
    if not (args.data and args.model):
        raise MonobayesError("give --corpus NAME or both --data and --model")
    text = Path(args.model).read_text()
    model = parse_qualitative_model(text, _auto_cardinalities(text, Path(args.data)))
    with open(args.data, newline="") as fh:
        dataset = DiscreteDataset.from_csv(fh, model)
    return dataset, model


def _check_epsilon(eps: float) -> None:
    if not 0 <= eps <= MAX_EPSILON:
        logger.warning("epsilon %.3g rejected: the feasible region is hard to reach above %.1f",
                       eps, MAX_EPSILON)
        raise MonobayesError(f"epsilon must lie in [0, {MAX_EPSILON}]")


def _write_json(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_fit(args) -> int:
    _check_epsilon(args.epsilon)
    dataset, model = _load_inputs(args)
    config = FitConfig(alpha=args.alpha)
    cpts, report = fit_network(dataset, model, args.epsilon, config)
    _write_json({"model": model.name, "epsilon": args.epsilon, "config": config.to_dict(),
                 "cpts": cpts_to_dict(cpts, model), "report": report.to_dict()}, args.out)
    if args.strict and not report.converged:
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_check(args) -> int:
    _check_epsilon(args.epsilon)
    dataset, model = _load_inputs(args)
    constraints = generate_constraints(model, args.epsilon)
    cpts = mle_theta(count_stats(dataset, model, args.alpha))
    feasible, violations = is_feasible(cpts, constraints, args.tolerance)
    _write_json({"feasible": feasible, "n_constraints": len(constraints),
                 "violations": [v.to_dict() for v in violations]}, args.out)
    return EXIT_OK


def cmd_discretize(args) -> int:
    with open(args.input, newline="") as fh:
        table = load_table(fh, header=not args.no_header)
    if args.corpus:
        if args.corpus not in RECIPES:
            raise MonobayesError(f"unknown corpus dataset {args.corpus!r}")
        recipe = RECIPES[args.corpus]
    else:
        if not args.class_column:
            raise MonobayesError("give --corpus NAME or --class COLUMN")
        recipe = infer_recipe(drop_incomplete(table), args.class_column)
    table = drop_incomplete(table, recipe.sources)
    dataset, spec = discretize(table, recipe, args.bins)
    out = Path(args.out)
    with open(out, "w", newline="") as fh:
        dataset.to_csv(fh)
    sidecar = out.with_suffix(out.suffix + ".cuts.json")
    doc = spec.to_dict()
    doc.update(rows=len(dataset), dropped=table.dropped,
               cardinalities=dataset.cardinalities)
    sidecar.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    logger.info("wrote %d rows to %s (%d incomplete dropped)", len(dataset), out, table.dropped)
    return EXIT_OK


def cmd_curve(args) -> int:
    spec = ExperimentSpec.from_dict(json.loads(Path(args.spec).read_text()))
    curve = run_learning_curve(spec, n_jobs=args.jobs)
    paths = emit_reports(curve, mcnemar_tally(curve), args.out)
    for p in paths.values():
        logger.info("wrote %s", p)
    if args.strict and not all(c.all() for c in curve.converged.values()):
        return EXIT_NONCONVERGED
    return EXIT_OK


def _read_predictions(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise MonobayesError(f"{path}: no predictions")
    try:
        ids = [r["instance_id"] for r in rows]
        return ids, [int(r["true"]) for r in rows], [int(r["predicted"]) for r in rows]
    except (KeyError, ValueError) as exc:
        raise MonobayesError(f"{path}: malformed prediction file ({exc})") from None


def cmd_mcnemar(args) -> int:
    ids_a, truth_a, pred_a = _read_predictions(args.a)
    ids_b, truth_b, pred_b = _read_predictions(args.b)
    if ids_a != ids_b or truth_a != truth_b:
        raise MonobayesError("prediction files do not cover the same instances")
    res = mcnemar_test(pred_a, pred_b, truth_a)
    _write_json({"b": res.b, "c": res.c, "statistic": res.statistic, "p_value": res.p_value,
                 "exact_p_value": exact_mcnemar_pvalue(res.b, res.c),
                 "significant": res.significant, "winner": res.winner}, args.out)
    return EXIT_OK


def cmd_predict(args) -> int:
    train, model = _load_inputs(args)
    with open(args.test, newline="") as fh:
        test = DiscreteDataset.from_csv(fh, model)
    clf = make_classifier(args.classifier, model, FitConfig(alpha=args.alpha))
    clf.fit(train.features(model.feature_names), train.y)
    buf = io.StringIO()
    export_predictions(clf, test, buf, model)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_NONCONVERGED if args.strict and not clf.converged_ else EXIT_OK


def _add_inputs(p):
    p.add_argument("--corpus", help="benchmark dataset name (auto-mpg, haberman, pima, bcw, car)")
    p.add_argument("--bins", type=int, default=2, choices=(2, 3, 5))
    p.add_argument("--data", help="integer-coded CSV with a header row")
    p.add_argument("--model", help="qualitative model file")
    p.add_argument("--alpha", type=float, default=1.0, help="Dirichlet pseudocount")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monobayes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit CPTs under monotonicity constraints")
    _add_inputs(p)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--out")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("check", help="report constraint violations of the plain estimate")
    _add_inputs(p)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--tolerance", type=float, default=DEFAULT_FEASIBILITY_TOL)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("discretize", help="recode a raw CSV into state indices")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bins", type=int, default=2, choices=(2, 3, 5))
    p.add_argument("--corpus", help="use the recipe of a benchmark dataset")
    p.add_argument("--class", dest="class_column", help="class column for generic input")
    p.add_argument("--no-header", action="store_true")
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("curve", help="run a learning-curve experiment from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("mcnemar", help="compare two prediction CSVs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mcnemar)

    p = sub.add_parser("predict", help="train one classifier and write test predictions")
    _add_inputs(p)
    p.add_argument("--test", required=True, help="integer-coded CSV of test rows")
    p.add_argument("--classifier", default="KB", help="ZR, NB, KB or CKB<eps>")
    p.add_argument("--out")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MonobayesError, OSError, json.JSONDecodeError) as exc:
        logger.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
