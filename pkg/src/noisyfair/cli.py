"""Command line entry point: ``noisyfair {train,evaluate,experiment,sweep,synth}``.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from . import harness
from . import metrics as M
from .baselines import train_naive_fair, train_unconstrained
from .classifier import LinearClassifier
from .constraints import ConstraintConfig
from .data import save_csv
from .exceptions import ConfigError, DataError, InfeasibleProgram
from .noise import inject_noise
from .synthetic import SyntheticSpec, make_synthetic, synthetic_schema
from .training import train_denoised

logger = logging.getLogger("noisyfair")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3


def _load_cfg(args):
    cfg = harness.ExperimentConfig.from_file(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "repetitions", None) is not None:
        cfg.repetitions = args.repetitions
    if getattr(args, "out", None) is not None:
        cfg.output = args.out
    cfg.__post_init__()
    return cfg


def _dataset(cfg, args):
    data = harness.load_dataset(cfg.dataset, cfg.seed)
    if getattr(args, "inject_noise", False):
        data = inject_noise(data, cfg.true_noise(), harness.sub_seed(cfg.seed, 2), cfg.attribute)
    return data


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_train(args):
    cfg = _load_cfg(args)
    data = _dataset(cfg, args)
    method = args.method or "denoised"
    metric, tau = cfg.metrics[0], cfg.taus[0]
    solver_cfg = cfg.solver_config()
    if method == "unconstrained":
        clf = train_unconstrained(data, solver_cfg, cfg.c)
        status = "converged"
    elif method == "naive":
        clf, res = train_naive_fair(data, metric, cfg.naive_tau or tau, solver_cfg, cfg.c, attribute=cfg.attribute,
                                    surrogate=cfg.surrogate_config(), return_result=True)
        status = res.status.value
    elif method == "denoised":
        ccfg = ConstraintConfig(tau=tau, delta=cfg.delta, lam=cfg.lam, metric=metric, attribute=cfg.attribute)
        try:
            clf, res = train_denoised(data, [(ccfg, cfg.assumed())], solver_cfg, cfg.c, cfg.surrogate_config())
        except InfeasibleProgram as e:
            logger.warning("%s; saving the least-violating fit", e)
            clf, res = e.classifier, e.result
        status = res.status.value
    else:
        raise ConfigError(f"cannot train method {method!r}")
    payload = dict(clf.to_dict(), method=method, metric=metric, tau=tau, status=status)
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_evaluate(args):
    cfg = _load_cfg(args)
    data = _dataset(cfg, args)
    try:
        model = json.loads(Path(args.model).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read model {args.model}: {e}") from None
    try:
        clf = LinearClassifier.from_dict(model)
        pred = clf.predict(data.features)
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"model {args.model} does not fit this dataset: {e}") from None
    out = {"n": data.n, "accuracy": M.accuracy(pred, data), "omega": {}, "relative_rates": {}}
    for m in cfg.eval_metrics:
        om, rel = harness._safe_fairness(pred, data, m, cfg.attribute)
        out["omega"][m] = om
        out["relative_rates"][m] = rel.tolist()
    _emit(harness.dumps(out), args.out)
    return EXIT_OK


def cmd_experiment(args):
    cfg = _load_cfg(args)
    report = harness.run_experiment(cfg)
    _emit(harness.dumps(report), cfg.output)
    if args.series:
        harness.write_series_csv(harness.series_rows(report), args.series)
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load_cfg(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad --values {args.values!r}") from None
    if not values:
        raise ConfigError("--values needs at least one number")
    reports, series = harness.sweep(cfg, args.axis, values)
    out = Path(args.out or "sweep")
    out.mkdir(parents=True, exist_ok=True)
    for v, rep in zip(values, reports):
        harness.write_report(rep, out / f"report_{args.axis}_{v:g}.json")
    harness.write_series_csv(series, out / "series.csv")
    return EXIT_OK


def cmd_synth(args):
    raw = harness.load_config_file(args.config) if args.config else {}
    if "dataset" in raw:
        raw = (raw["dataset"] or {}).get("synthetic") or {}
    spec = SyntheticSpec.from_dict(raw)
    seed = args.seed if args.seed is not None else 0
    data = make_synthetic(spec, seed)
    if not args.out:
        raise ConfigError("synth needs --out")
    schema = synthetic_schema(spec)
    save_csv(data, args.out, schema)
    schema_path = Path(str(args.out) + ".schema.yaml")
    schema_path.write_text(yaml.safe_dump({"path": Path(args.out).name, "schema": schema.to_dict()}, sort_keys=True))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="noisyfair", description="Fair classification under noisy protected attributes.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="YAML experiment config")
        sp.add_argument("--seed", type=int, default=None, help="override the master seed")
        sp.add_argument("--out", default=None, help="output path (stdout when omitted)")

    sp = sub.add_parser("train", help="fit one classifier on the configured dataset and write it as JSON")
    common(sp)
    sp.add_argument("--method", choices=["unconstrained", "naive", "denoised"], default=None)
    sp.add_argument("--inject-noise", action="store_true", help="corrupt the attribute with the configured noise first")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("evaluate", help="accuracy and fairness of a saved classifier")
    common(sp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--inject-noise", action="store_true")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("experiment", help="repeated split/corrupt/train/evaluate runs")
    common(sp)
    sp.add_argument("--repetitions", type=int, default=None)
    sp.add_argument("--series", default=None, help="also write a plot-series CSV here")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("sweep", help="one experiment per axis value plus a merged series CSV")
    common(sp)
    sp.add_argument("--axis", choices=list(harness.SWEEP_AXES), required=True)
    sp.add_argument("--values", required=True, help="comma separated, e.g. 0.1,0.2,0.3")
    sp.add_argument("--repetitions", type=int, default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("synth", help="write a synthetic benchmark CSV and its schema")
    common(sp, config_required=False)
    sp.set_defaults(func=cmd_synth)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
