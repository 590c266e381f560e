"""Batch front door: every engine capability runnable headlessly over files.

Each command writes its outputs atomically into ``--out DIR`` together
with a ``manifest.json`` sidecar (command, input hashes, seed, params,
output hashes, tool version, timestamps). Outputs themselves contain no
timestamps, so repeated seeded runs are hash-identical.

Exit codes: 0 success, 2 input/validation failure, 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, cluster, fuse, judge, learn, qca, schema


class CliError(Exception):
    """Input or validation problem; maps to exit code 2."""


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class OutputDir:
    def __init__(self, out: str, command: str, argv: list[str]):
        self.dir = Path(out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.argv = argv
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.params: dict = {}
        self.seed: int | None = None
        self.started = time.time()

    def track_input(self, path: str | Path) -> Path:
        p = Path(path)
        if not p.exists():
            raise CliError(f"input not found: {p}")
        self.inputs[str(p)] = _sha256_file(p)
        return p

    def write(self, name: str, text: str) -> None:
        final = self.dir / name
        tmp = final.with_name(final.name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, final)
        self.outputs[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "argv": self.argv,
            "tool_version": __version__,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "seed": self.seed,
            "params": self.params,
            "started": self.started,
            "finished": time.time(),
        }
        final = self.dir / "manifest.json"
        tmp = final.with_name("manifest.json.tmp")
        tmp.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        os.replace(tmp, final)


def _load_taxonomy(arg: str | None, out: OutputDir) -> schema.Taxonomy:
    if arg is None:
        return schema.bundled_taxonomy()
    path = out.track_input(arg)
    try:
        return schema.load_taxonomy(path)
    except schema.TaxonomyError as e:
        raise CliError(f"bad taxonomy document: {e}") from e


def _load_models(taxonomy, path_arg: str, out: OutputDir) -> list[schema.BusinessModel]:
    path = out.track_input(path_arg)
    try:
        return schema.load_ventures_csv(taxonomy, path)
    except ValueError as e:
        raise CliError(f"bad ventures CSV: {e}") from e


def _encoded_dataset(taxonomy, models, *, require_labels: bool) -> learn.LabeledDataset:
    labeled = [m for m in models if m.label is not None] if require_labels else models
    if require_labels and len(labeled) < len(models):
        labeled = [m for m in models if m.label is not None]
    if require_labels and not labeled:
        raise CliError("dataset has no series_a labels")
    try:
        bits, ids = schema.encode_dataset(taxonomy, labeled)
    except schema.ModelValidationError as e:
        raise CliError(f"invalid model in dataset: {e}") from e
    return learn.LabeledDataset(
        x=bits.astype(np.float64),
        y=np.array([m.label or 0 for m in labeled], dtype=np.int8),
        feature_names=taxonomy.feature_names(),
        ids=ids,
    )


# -- commands -----------------------------------------------------------------


def cmd_encode(args, out: OutputDir) -> int:
    taxonomy = _load_taxonomy(args.taxonomy, out)
    models = _load_models(taxonomy, args.ventures, out)
    reports = [(m.venture_id, schema.validate_model(taxonomy, m)) for m in models]
    bad = [(vid, r) for vid, r in reports if not r.ok]
    if bad:
        lines = [
            f"{vid}: {f.message}" for vid, r in bad for f in r.findings
        ]
        out.write("validation_errors.txt", "\n".join(lines) + "\n")
        out.finish()
        print(f"{len(bad)} invalid models; see validation_errors.txt", file=sys.stderr)
        return 2
    bits, ids = schema.encode_dataset(taxonomy, models)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["venture_id", *taxonomy.feature_names()])
    for vid, row in zip(ids, bits):
        w.writerow([vid, *row.tolist()])
    out.write("encoded.csv", buf.getvalue())
    print(f"encoded {len(ids)} ventures at width {taxonomy.feature_width}")
    return 0


def _selection_csv(sel: cluster.KSelection) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "mean_silhouette", "cost", "chosen"])
    for rec in sel.records:
        w.writerow(
            [
                rec.k,
                f"{rec.silhouette:.6f}",
                f"{rec.clustering.cost:.6f}",
                int(rec.k == sel.chosen_k),
            ]
        )
    return buf.getvalue()


def cmd_cluster(args, out: OutputDir) -> int:
    taxonomy = _load_taxonomy(args.taxonomy, out)
    models = _load_models(taxonomy, args.ventures, out)
    bits, ids = schema.encode_dataset(taxonomy, models)
    if args.component:
        blocks = taxonomy.component_blocks()
        if args.component not in blocks:
            raise CliError(
                f"unknown component {args.component!r}; "
                f"options: {sorted(blocks)}"
            )
        bits = bits[:, blocks[args.component]]
    rows = [tuple(int(b) for b in row) for row in bits]
    sel = cluster.select_k(
        rows,
        args.k_min,
        args.k_max,
        restarts=args.restarts,
        seed=args.seed,
        metric=args.metric,
    )
    out.write("silhouette_curve.csv", _selection_csv(sel))
    chosen = next(r for r in sel.records if r.k == sel.chosen_k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["venture_id", "cluster"])
    for vid, label in zip(ids, chosen.clustering.assignments):
        w.writerow([vid, int(label)])
    out.write("assignments.csv", buf.getvalue())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cluster", "size", "mode"])
    for i, summary in enumerate(chosen.clustering.summaries):
        w.writerow([i, summary.size, "|".join(str(v) for v in summary.mode)])
    out.write("modes.csv", buf.getvalue())
    summary = {
        "chosen_k": sel.chosen_k,
        "mean_silhouette": chosen.silhouette,
        "cost": chosen.clustering.cost,
        "frequency_cost": chosen.clustering.frequency_cost,
        "k_max_clamped_to": sel.k_max_clamped_to,
        "fallback_global_max": sel.fallback_global_max,
        "metric": args.metric,
    }
    out.write("selection.json", json.dumps(summary, indent=2) + "\n")
    print(f"chosen k = {sel.chosen_k} (mean silhouette {chosen.silhouette:.3f})")
    return 0


def cmd_archetypes(args, out: OutputDir) -> int:
    taxonomy = _load_taxonomy(args.taxonomy, out)
    models = _load_models(taxonomy, args.ventures, out)
    try:
        result = cluster.find_archetypes(
            taxonomy,
            models,
            component_k=(args.k_min, args.k_max),
            pattern_k=(args.pattern_k_min, args.pattern_k_max),
            restarts=args.restarts,
            seed=args.seed,
            metric=args.metric,
        )
    except cluster.ClusterError as e:
        raise CliError(str(e)) from e
    comp = {
        name: {
            "chosen_k": sel.chosen_k,
            "mean_silhouette": next(
                r.silhouette for r in sel.records if r.k == sel.chosen_k
            ),
        }
        for name, sel in result.component_selections.items()
    }
    out.write("components.json", json.dumps(comp, indent=2) + "\n")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["venture_id", *result.component_names])
    for vid, row in zip(result.venture_ids, result.membership_rows):
        w.writerow([vid, *row.tolist()])
    out.write("memberships.csv", buf.getvalue())
    pattern = result.pattern_selection
    chosen = next(r for r in pattern.records if r.k == pattern.chosen_k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["venture_id", "pattern"])
    for vid, label in zip(result.success_ids, chosen.clustering.assignments):
        w.writerow([vid, int(label)])
    out.write("patterns.csv", buf.getvalue())
    out.write("pattern_curve.csv", _selection_csv(pattern))
    print(
        f"{len(result.success_ids)} successful ventures -> "
        f"{pattern.chosen_k} patterns"
    )
    return 0


def cmd_train(args, out: OutputDir) -> int:
    taxonomy = _load_taxonomy(args.taxonomy, out)
    models = _load_models(taxonomy, args.ventures, out)
    ds = _encoded_dataset(taxonomy, models, require_labels=True)
    try:
        forest = learn.forest_fit(
            ds,
            n_trees=args.n_trees,
            seed=args.seed,
            max_depth=args.max_depth,
        )
    except learn.LearnError as e:
        raise CliError(str(e)) from e
    out.write("forest.json", json.dumps(learn.model_to_dict(forest)))
    oob = learn.oob_accuracy(forest, ds)
    out.write(
        "training.json",
        json.dumps(
            {"n_rows": ds.n, "n_trees": args.n_trees, "oob_accuracy": oob},
            indent=2,
        )
        + "\n",
    )
    print(f"forest of {args.n_trees} trees; out-of-bag accuracy {oob:.3f}")
    return 0


def cmd_importance(args, out: OutputDir) -> int:
    path = out.track_input(args.model)
    try:
        model = learn.load_model(path)
    except (learn.LearnError, json.JSONDecodeError) as e:
        raise CliError(f"bad model file: {e}") from e
    if not isinstance(model, learn.Forest):
        raise CliError("importance needs a forest model")
    imp = learn.feature_importance(model)
    ordered = sorted(imp.weights.items(), key=lambda kv: (-kv[1], kv[0]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["feature", "importance"])
    for name, weight in ordered:
        w.writerow([name, f"{weight:.8f}"])
    out.write("importance.csv", buf.getvalue())
    if imp.degenerate:
        print("forest has no splits; importances are all zero", file=sys.stderr)
    else:
        top = ", ".join(f"{n} ({v:.3f})" for n, v in ordered[:5])
        print(f"top features: {top}")
    return 0


def cmd_evaluate(args, out: OutputDir) -> int:
    taxonomy = _load_taxonomy(args.taxonomy, out)
    models = _load_models(taxonomy, args.ventures, out)
    ds = _encoded_dataset(taxonomy, models, require_labels=True)
    predictors: dict[str, fuse.Fitter] = {}
    for name in args.predictors.split(","):
        name = name.strip()
        if name == "forest":
            predictors[name] = lambda d: learn.forest_fit(
                d, n_trees=args.n_trees, seed=args.seed
            )
        elif name == "cart":
            predictors[name] = lambda d: learn.cart_fit(d, max_depth=args.max_depth)
        elif name in ("logistic", "naive_bayes"):
            predictors[name] = lambda d, kind=name: learn.fit_baseline(kind, d)
        else:
            raise CliError(f"unknown predictor {name!r}")
    crowd_scores = None
    if args.crowd:
        path = out.track_input(args.crowd)
        table: dict[str, float] = {}
        with open(path, encoding="utf-8") as f:
            for rec in csv.DictReader(f):
                table[rec["venture_id"]] = float(rec["probability"])
        crowd_scores = {"crowd": table}
    try:
        pt = fuse.evaluate_cv(
            predictors,
            ds,
            crowd_scores,
            k=args.folds,
            seed=args.seed,
            threshold=args.threshold,
        )
    except fuse.FuseError as e:
        raise CliError(str(e)) from e
    out.write("performance.csv", pt.to_csv())
    out.write("report.txt", fuse.compare_report(pt))
    print(fuse.compare_report(pt), end="")
    return 0


def cmd_qca(args, out: OutputDir) -> int:
    path = out.track_input(args.cases)
    try:
        cs = qca.load_cases_csv(
            path.read_text(encoding="utf-8"),
            args.outcome,
            calibrate=not args.already_calibrated,
        )
    except (qca.QcaError, ValueError, KeyError) as e:
        raise CliError(f"bad cases CSV: {e}") from e
    try:
        tt = qca.build_truth_table(cs, freq=args.freq, cons=args.consistency)
    except qca.QcaError as e:
        raise CliError(str(e)) from e
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*tt.conditions, "count", "consistency", "status"])
    for row in tt.rows:
        w.writerow(
            [
                *row.combination,
                row.count,
                f"{row.consistency:.6f}",
                row.status,
            ]
        )
    out.write("truth_table.csv", buf.getvalue())
    expectations = {}
    for spec_item in args.expect or []:
        if "=" not in spec_item:
            raise CliError(f"--expect needs condition=direction, got {spec_item!r}")
        name, direction = spec_item.split("=", 1)
        expectations[name.strip()] = direction.strip()
    parsimonious = qca.minimize_parsimonious(tt)
    intermediate = qca.minimize_intermediate(tt, expectations)
    report = []
    for sol in (parsimonious, intermediate):
        report.append(f"== {sol.kind} solution ==")
        if sol.empty:
            report.append("(no configuration passed the thresholds)")
            continue
        for term in sol.terms:
            report.append(
                f"  {qca.term_expression(term, sol.conditions)}  "
                f"consistency={term.consistency:.3f}  "
                f"raw={term.raw_coverage:.3f}  unique={term.unique_coverage:.3f}"
            )
        report.append(
            f"  overall consistency={sol.solution_consistency:.3f} "
            f"coverage={sol.solution_coverage:.3f}"
        )
    out.write("solutions.txt", "\n".join(report) + "\n")
    if not intermediate.empty:
        out.write("solution_chart.txt", qca.solution_report(parsimonious, intermediate))
    print("\n".join(report))
    return 0


def cmd_simulate_crowd(args, out: OutputDir) -> int:
    rating_schema = judge.SCHEMAS.get(args.schema)
    if rating_schema is None:
        raise CliError(f"unknown schema {args.schema!r}; options: {sorted(judge.SCHEMAS)}")
    sheets = judge.simulate_crowd(
        args.seed, args.true_quality, args.raters, args.noise_sd, rating_schema
    )
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["evaluator_id", *rating_schema.criteria])
    for s in sheets:
        w.writerow([s.evaluator_id, *(s.scores[c] for c in rating_schema.criteria)])
    out.write("sheets.csv", buf.getvalue())
    cs = judge.aggregate_unweighted(rating_schema, sheets)
    out.write(
        "aggregate.json",
        json.dumps(
            {
                "means": cs.means,
                "composite": cs.composite,
                "n_sheets": cs.n_sheets,
                "probability": judge.composite_to_probability(cs, rating_schema),
            },
            indent=2,
        )
        + "\n",
    )
    print(f"{args.raters} raters -> composite {cs.composite:.3f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_config

    config = load_config(args.config) if args.config else load_config()
    if args.store:
        config.store_dir = args.store
    if args.port:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ventureval",
        description="Business-model validation toolkit: encoding, clustering, "
        "training, evaluation, configurational analysis, and the service.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", required=True, help="output directory")
        if seed:
            p.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("encode", help="one-hot encode a ventures CSV")
    common(p, seed=False)
    p.add_argument("--taxonomy", help="taxonomy YAML (default: bundled IoT)")
    p.add_argument("--ventures", required=True)
    p.set_defaults(func=cmd_encode, needs_out=True)

    p = sub.add_parser("cluster", help="k-modes with silhouette k selection")
    common(p)
    p.add_argument("--taxonomy")
    p.add_argument("--ventures", required=True)
    p.add_argument("--component", help="restrict to one sub-layer block")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=30)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--metric", choices=["hamming", "frequency"], default="hamming")
    p.set_defaults(func=cmd_cluster, needs_out=True)

    p = sub.add_parser("archetypes", help="two-stage component/pattern clustering")
    common(p)
    p.add_argument("--taxonomy")
    p.add_argument("--ventures", required=True)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=30)
    p.add_argument("--pattern-k-min", type=int, default=2)
    p.add_argument("--pattern-k-max", type=int, default=20)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--metric", choices=["hamming", "frequency"], default="hamming")
    p.set_defaults(func=cmd_archetypes, needs_out=True)

    p = sub.add_parser("train", help="fit the success forest on labeled ventures")
    common(p)
    p.add_argument("--taxonomy")
    p.add_argument("--ventures", required=True)
    p.add_argument("--n-trees", type=int, default=1000)
    p.add_argument("--max-depth", type=int)
    p.set_defaults(func=cmd_train, needs_out=True)

    p = sub.add_parser("importance", help="feature importances of a saved forest")
    common(p, seed=False)
    p.add_argument("--model", required=True, help="forest.json from `train`")
    p.set_defaults(func=cmd_importance, needs_out=True)

    p = sub.add_parser("evaluate", help="cross-validated MCC and fusion report")
    common(p)
    p.add_argument("--taxonomy")
    p.add_argument("--ventures", required=True)
    p.add_argument(
        "--predictors",
        default="forest,logistic,naive_bayes",
        help="comma list: forest,cart,logistic,naive_bayes",
    )
    p.add_argument("--crowd", help="CSV with venture_id,probability columns")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--n-trees", type=int, default=100)
    p.add_argument("--max-depth", type=int)
    p.set_defaults(func=cmd_evaluate, needs_out=True)

    p = sub.add_parser("qca", help="calibrate, build the truth table, minimize")
    common(p, seed=False)
    p.add_argument("--cases", required=True, help="CSV of cases x conditions + outcome")
    p.add_argument("--outcome", required=True, help="outcome column name")
    p.add_argument("--freq", type=int, default=1)
    p.add_argument("--consistency", type=float, default=0.9)
    p.add_argument(
        "--already-calibrated",
        action="store_true",
        help="treat values as memberships instead of calibrating",
    )
    p.add_argument(
        "--expect",
        action="append",
        help="directional expectation, e.g. --expect growth=present",
    )
    p.set_defaults(func=cmd_qca, needs_out=True)

    p = sub.add_parser("simulate-crowd", help="seeded synthetic rating sheets")
    common(p)
    p.add_argument("--true-quality", type=float, required=True)
    p.add_argument("--raters", type=int, required=True)
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--schema", default="mentor10")
    p.set_defaults(func=cmd_simulate_crowd, needs_out=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="service config YAML")
    p.add_argument("--store", help="override store directory")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve, needs_out=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if not args.needs_out:
            return args.func(args)
        out = OutputDir(args.out, args.command, argv)
        out.seed = getattr(args, "seed", None)
        out.params = {
            k: v
            for k, v in vars(args).items()
            if k not in ("func", "needs_out", "command", "out", "seed")
            and not callable(v)
        }
        code = args.func(args, out)
        out.finish()
        return code
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # pragma: no cover - unexpected failure path
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
