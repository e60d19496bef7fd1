"""Command-line surface.

    audit-lab blackbox   --config cfg.json [--out f] [--format csv|json] [--seed-offset k]
    audit-lab mixture    --config cfg.json [--out f] [--format csv|json] [--seed-offset k]
    audit-lab lower-bound --config cfg.json [--out f]
    audit-lab ingest     --dataset {adult|law} --path data.csv --out parsed.json
    audit-lab summarize  --instance inst.json --classifier clf.json [--mc-n N] [--seed s]

Exit codes: 0 success, 2 configuration/schema error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction

import numpy as np

from .errors import AuditLabError, ConfigError, RowError, SchemaError
from .harness import (
    ExperimentConfig,
    INGESTORS,
    emit_results,
    run_blackbox_sweep,
    run_lower_bound_check,
    run_mixture_sweep,
)
from .instances import (
    LogisticModel,
    LowerBoundInstance,
    MixtureAuditInstance,
    builtin_classifier,
    population_summary,
)
from .rng import RngStream


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.from_json_file(args.config)
    if args.seed_offset:
        config = replace(config, seeds=tuple(s + args.seed_offset for s in config.seeds))
    if args.out:
        config = replace(config, output_path=args.out)
    return config


def _emit(rows, config: ExperimentConfig, fmt: str) -> None:
    if config.output_path:
        emit_results(rows, config.output_path, fmt)
        print(f"wrote {len(rows)} rows to {config.output_path}")
    else:
        import io as _io
        import tempfile, os

        tmp = tempfile.NamedTemporaryFile("w", delete=False, suffix=f".{fmt}")
        tmp.close()
        emit_results(rows, tmp.name, fmt)
        with open(tmp.name) as fh:
            sys.stdout.write(fh.read())
        os.unlink(tmp.name)


def _cmd_blackbox(args) -> int:
    config = _load_config(args)
    rows = run_blackbox_sweep(config)
    _emit(rows, config, args.format)
    return 0


def _cmd_mixture(args) -> int:
    config = _load_config(args)
    rows = run_mixture_sweep(config)
    _emit(rows, config, args.format)
    return 0


def _cmd_lower_bound(args) -> int:
    config = _load_config(args)
    report = run_lower_bound_check(config)
    doc = json.dumps(report, indent=2)
    if config.output_path:
        with open(config.output_path, "w") as fh:
            fh.write(doc + "\n")
        print(f"wrote lower-bound report to {config.output_path}")
    else:
        print(doc)
    return 0


def _cmd_ingest(args) -> int:
    ds = INGESTORS[args.dataset](args.path)
    doc = {
        "name": ds.name,
        "n": ds.n,
        "feature_cols": ds.feature_cols,
        "a": ds.a.tolist(),
        "y": ds.y.tolist(),
        "table": {
            c: [v if isinstance(v, str) else float(v) for v in ds.table[c]]
            for c in ds.feature_cols
        },
    }
    with open(args.out, "w") as fh:
        json.dump(doc, fh)
    print(f"ingested {ds.n} rows from {args.path} into {args.out}")
    return 0


def _load_instance(path):
    with open(path) as fh:
        doc = fh.read()
    obj = json.loads(doc)
    if "hypothesis" in obj:
        return LowerBoundInstance.from_json(doc)
    return MixtureAuditInstance.from_json(doc)


def _load_classifier(path):
    with open(path) as fh:
        obj = json.load(fh)
    kind = obj.get("kind")
    if kind in ("random", "sense_attr"):
        return builtin_classifier(kind, seed=int(obj.get("seed", 0)))
    if kind == "logistic":
        return LogisticModel(
            weights=np.asarray(obj["weights"], dtype=float),
            bias=float(obj["bias"]),
            threshold=float(obj.get("threshold", 0.5)),
            include_group=bool(obj.get("include_group", True)),
            numeric_mean=np.asarray(obj["numeric_mean"], dtype=float)
            if "numeric_mean" in obj
            else None,
            numeric_std=np.asarray(obj["numeric_std"], dtype=float)
            if "numeric_std" in obj
            else None,
        )
    raise ConfigError(f"unknown classifier kind {kind!r}")


def _cmd_summarize(args) -> int:
    instance = _load_instance(args.instance)
    if isinstance(instance, LowerBoundInstance):
        summary = population_summary(instance, None, "exact")
    else:
        classifier = _load_classifier(args.classifier)
        summary = population_summary(
            instance, classifier, "monte_carlo", n=args.mc_n, rng=RngStream(args.seed)
        )

    def plain(v):
        return float(v) if isinstance(v, (Fraction, float, np.floating)) else v

    doc = {
        "beta": plain(summary.beta_neg_rate),
        "beta_a": {str(k): plain(v) for k, v in summary.beta_a.items()},
        "p_cond": {f"{y},{a}": plain(v) for (y, a), v in summary.p_cond.items()},
        "q_cond": {f"{y},{a}": plain(v) for (y, a), v in summary.q_cond.items()},
        "gamma": {f"{i},{j}": plain(v) for (i, j), v in summary.gamma.items()},
        "eod": plain(summary.eod),
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="audit-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (
        ("blackbox", _cmd_blackbox),
        ("mixture", _cmd_mixture),
        ("lower-bound", _cmd_lower_bound),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--seed-offset", type=int, default=0)
        p.set_defaults(fn=fn)

    p = sub.add_parser("ingest")
    p.add_argument("--dataset", choices=sorted(INGESTORS), required=True)
    p.add_argument("--path", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("summarize")
    p.add_argument("--instance", required=True)
    p.add_argument("--classifier", default=None)
    p.add_argument("--mc-n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_summarize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, SchemaError, RowError, json.JSONDecodeError, FileNotFoundError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (AuditLabError, OSError) as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
