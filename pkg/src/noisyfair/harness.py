"""Repeated split / corrupt / train / evaluate runs and their aggregation.

Repetition ``r`` derives every random seed it uses from ``rep_seed(master, r)``
(a splitmix64 mix), so a run is reproducible from the master seed alone and
repetitions can execute in any order or in parallel.
"""

from __future__ import annotations

import copy
import csv
import dataclasses
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import metrics as M
from .baselines import randomized_labeling, train_naive_fair, train_unconstrained
from .constraints import ConstraintConfig
from .data import DatasetSchema, load_csv, split
from .exceptions import AllUndefined, ConfigError, DataError, InfeasibleProgram
from .noise import binary_from_etas, build_noise_matrix, identity, inject_noise
from .reference import annotations
from .solver import SolverConfig
from .synthetic import SyntheticSpec, make_synthetic
from .training import Surrogate, hard_feasible, train_denoised

logger = logging.getLogger(__name__)

METHODS = ("unconstrained", "naive", "denoised", "randomized")
MASK64 = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def rep_seed(master_seed, rep):
    return splitmix64((int(master_seed) & MASK64) ^ splitmix64(rep))


def sub_seed(seed, k):
    return splitmix64((seed + k) & MASK64) >> 32


def parse_noise(spec, p=None):
    """Noise from ``{"etas": [e0, e1]}``, ``{"matrix": [[...]]}``, a bare matrix or None (identity)."""
    if spec is None:
        return identity(p or 2)
    if isinstance(spec, dict):
        if "etas" in spec:
            e = spec["etas"]
            e = [e, e] if np.isscalar(e) else list(e)
            return binary_from_etas(float(e[0]), float(e[1]))
        if "matrix" in spec:
            return build_noise_matrix(spec["matrix"])
        raise ConfigError("noise needs an 'etas' or 'matrix' entry")
    return build_noise_matrix(spec)


@dataclass
class ExperimentConfig:
    dataset: dict
    noise: object = None
    assumed_noise: object = None
    attribute: int = 0
    methods: tuple = ("unconstrained", "naive", "denoised")
    metrics: tuple = ("sr",)
    eval_metrics: tuple = None
    taus: tuple = (0.8,)
    naive_tau: float = None
    delta: float = 0.05
    lam: float = 0.1
    c: float = 0.0
    randomized_alpha: float = 0.5
    repetitions: int = 50
    train_fraction: float = 0.7
    seed: int = 0
    surrogate: dict = field(default_factory=lambda: {"kind": "soft", "temperature": 0.2})
    solver: dict = field(default_factory=dict)
    workers: int = 1
    reference: str = None
    output: str = None

    def __post_init__(self):
        self.methods = tuple(self.methods)
        self.metrics = tuple(M.get_metric(m).name for m in ([self.metrics] if isinstance(self.metrics, str) else self.metrics))
        if self.eval_metrics is None:
            self.eval_metrics = self.metrics
        self.eval_metrics = tuple(M.get_metric(m).name for m in self.eval_metrics)
        self.taus = tuple(float(t) for t in np.atleast_1d(self.taus))
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {list(METHODS)}")
        if int(self.repetitions) < 1:
            raise ConfigError("repetitions must be >= 1")
        if any(not 0.0 <= t <= 1.0 for t in self.taus):
            raise ConfigError("tau values must lie in [0, 1]")
        if not isinstance(self.dataset, dict) or not ({"synthetic", "path"} & set(self.dataset)):
            raise ConfigError("dataset needs a 'synthetic' or 'path' entry")
        # fail fast on malformed sub-configs
        self.solver_config()
        self.surrogate_config()
        self.true_noise()

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "dataset" not in d:
            raise ConfigError("config needs a 'dataset' section")
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    @classmethod
    def from_file(cls, path):
        cfg = cls.from_dict(load_config_file(path))
        base = Path(path).parent
        ds = cfg.dataset
        if "path" in ds and not Path(ds["path"]).is_absolute():
            cfg.dataset = dict(ds, path=str(base / ds["path"]))
        return cfg

    def to_dict(self):
        d = dataclasses.asdict(self)
        return json.loads(json.dumps(d, default=list))

    def solver_config(self):
        return SolverConfig.from_dict(self.solver)

    def surrogate_config(self):
        s = self.surrogate or {}
        try:
            return Surrogate(**s)
        except TypeError as e:
            raise ConfigError(f"bad surrogate section: {e}") from None

    def true_noise(self):
        return parse_noise(self.noise)

    def assumed(self):
        return parse_noise(self.assumed_noise) if self.assumed_noise is not None else self.true_noise()


def load_config_file(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        d = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: {e}") from None
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return d


def load_dataset(ds_cfg, seed=0):
    if "synthetic" in ds_cfg:
        spec = SyntheticSpec.from_dict(ds_cfg.get("synthetic") or {})
        return make_synthetic(spec, seed)
    if "schema" not in ds_cfg:
        raise ConfigError("dataset with a path needs a schema")
    schema = DatasetSchema.from_dict(ds_cfg["schema"])
    try:
        return load_csv(ds_cfg["path"], schema)
    except FileNotFoundError as e:
        raise DataError(str(e)) from None


def _safe_fairness(pred, dataset, metric, attribute):
    try:
        q = M.group_rates(M.empirical_rates(pred, dataset, metric, attribute))
        return M.omega(q), M.relative_rates(q)
    except AllUndefined:
        p = dataset.n_groups[attribute]
        return float("nan"), np.full(p, np.nan)


def evaluate(pred, noisy, true, cfg):
    row = {"accuracy": M.accuracy(pred, true)}
    for m in cfg.eval_metrics:
        for tag, ds in (("noisy", noisy), ("true", true)):
            om, rel = _safe_fairness(pred, ds, m, cfg.attribute)
            row[f"omega_{m}_{tag}"] = om
            row[f"relative_{m}_{tag}"] = rel.tolist()
    return row


def _method_runs(cfg):
    runs = []
    for method in cfg.methods:
        if method in ("unconstrained", "randomized"):
            runs.append((method, None, None))
        else:
            for metric in cfg.metrics:
                taus = cfg.taus if method == "denoised" or cfg.naive_tau is None else (cfg.naive_tau,)
                for tau in taus:
                    runs.append((method, metric, tau))
    return runs


def run_repetition(cfg, rep):
    seed = rep_seed(cfg.seed, rep)
    if "synthetic" in cfg.dataset:
        data = load_dataset(cfg.dataset, sub_seed(seed, 0))
    else:
        data = _cached_dataset(cfg.dataset)
    train, test = split(data, cfg.train_fraction, sub_seed(seed, 1))
    H_true = cfg.true_noise()
    H_assumed = cfg.assumed()
    train_noisy = inject_noise(train, H_true, sub_seed(seed, 2), cfg.attribute)
    test_noisy = inject_noise(test, H_true, sub_seed(seed, 3), cfg.attribute)
    solver_cfg = dataclasses.replace(cfg.solver_config(), seed=sub_seed(seed, 4))
    surrogate = cfg.surrogate_config()

    rows = []
    for method, metric, tau in _method_runs(cfg):
        status = "converged"
        hard_ok = True
        if method == "unconstrained":
            clf = train_unconstrained(train_noisy, solver_cfg, cfg.c)
            pred = clf.predict(test_noisy.features)
        elif method == "randomized":
            pred = randomized_labeling(test_noisy, cfg.randomized_alpha, sub_seed(seed, 5))
        elif method == "naive":
            clf, res = train_naive_fair(train_noisy, metric, tau, solver_cfg, cfg.c, delta=0.0, lam=0.0,
                                        attribute=cfg.attribute, surrogate=surrogate, return_result=True)
            status, hard_ok = res.status.value, hard_feasible(res)
            pred = clf.predict(test_noisy.features)
        else:
            ccfg = ConstraintConfig(tau=tau, delta=cfg.delta, lam=cfg.lam, metric=metric, attribute=cfg.attribute)
            try:
                clf, res = train_denoised(train_noisy, [(ccfg, H_assumed)], solver_cfg, cfg.c, surrogate)
            except InfeasibleProgram as e:
                clf, res = e.classifier, e.result
            status, hard_ok = res.status.value, hard_feasible(res)
            pred = clf.predict(test_noisy.features)
        row = {"rep": rep, "seed": seed, "method": method, "metric": metric, "tau": tau,
               "status": status, "hard_feasible": hard_ok}
        row.update(evaluate(pred, test_noisy, test, cfg))
        rows.append(row)
    return rows


_DATA_CACHE = {}


def _cached_dataset(ds_cfg):
    key = json.dumps(ds_cfg, sort_keys=True, default=str)
    if key not in _DATA_CACHE:
        _DATA_CACHE[key] = load_dataset(ds_cfg)
    return _DATA_CACHE[key]


def mean_se(values):
    v = np.asarray([x for x in values if not (isinstance(x, float) and math.isnan(x))], dtype=float)
    if v.size == 0:
        return {"mean": None, "se": None, "count": 0}
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return {"mean": float(v.mean()), "se": se, "count": int(v.size)}


def aggregate(rows, cfg):
    groups = {}
    for row in rows:
        groups.setdefault((row["method"], row["metric"], row["tau"]), []).append(row)
    summary = []
    for (method, metric, tau), rs in groups.items():
        entry = {"method": method, "metric": metric, "tau": tau, "repetitions": len(rs),
                 "accuracy": mean_se([r["accuracy"] for r in rs]),
                 "infeasible": sum(r["status"] == "infeasible" for r in rs),
                 "hard_infeasible": sum(not r["hard_feasible"] for r in rs),
                 "omega": {}, "relative_rates": {}}
        for m in cfg.eval_metrics:
            entry["omega"][m] = {}
            entry["relative_rates"][m] = {}
            for tag in ("noisy", "true"):
                entry["omega"][m][tag] = mean_se([r[f"omega_{m}_{tag}"] for r in rs])
                rel = np.array([r[f"relative_{m}_{tag}"] for r in rs], dtype=float)
                entry["relative_rates"][m][tag] = [mean_se(rel[:, j].tolist()) for j in range(rel.shape[1])]
        summary.append(entry)
    return summary


def run_experiment(cfg):
    """Run ``cfg.repetitions`` repetitions and return the report dictionary."""
    reps = range(int(cfg.repetitions))
    if cfg.workers and cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(run_repetition, [cfg] * len(reps), reps))
    else:
        chunks = [run_repetition(cfg, r) for r in reps]
    rows = [row for chunk in chunks for row in chunk]
    report = {"config": cfg.to_dict(), "summary": aggregate(rows, cfg), "rows": rows}
    if "synthetic" in cfg.dataset:
        report["generator"] = SyntheticSpec.from_dict(cfg.dataset.get("synthetic") or {}).to_dict()
    if cfg.reference:
        report["reference"] = annotations(cfg.reference)
    return report


def series_rows(report, axis="none", value=0.0):
    """Flatten a report summary into plot rows: mean and stderr per metric."""
    rows = []
    for e in report["summary"]:
        row = {"axis": axis, "value": value, "method": e["method"], "metric": e["metric"], "tau": e["tau"],
               "accuracy_mean": e["accuracy"]["mean"], "accuracy_se": e["accuracy"]["se"]}
        for m, d in e["omega"].items():
            for tag, s in d.items():
                row[f"omega_{m}_{tag}_mean"] = s["mean"]
                row[f"omega_{m}_{tag}_se"] = s["se"]
        rows.append(row)
    return rows


SWEEP_AXES = ("tau", "eta", "assumed_eta")


def sweep_configs(cfg, axis, values):
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {list(SWEEP_AXES)}")
    out = []
    for v in values:
        c = copy.deepcopy(cfg)
        v = float(v)
        if axis == "tau":
            c.taus = (v,)
        elif axis == "eta":
            c.noise = {"etas": [v, v]}
            c.assumed_noise = None
        else:
            c.assumed_noise = {"etas": [v, v]}
        c.__post_init__()
        out.append(c)
    return out


def sweep(cfg, axis, values):
    """One report per axis value plus flat plot-series rows."""
    reports = [run_experiment(c) for c in sweep_configs(cfg, axis, values)]
    series = [row for v, rep in zip(values, reports) for row in series_rows(rep, axis, float(v))]
    return reports, series


def _clean(obj):
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps(report):
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def write_report(report, path):
    Path(path).write_text(dumps(report), encoding="utf-8")


def write_series_csv(series, path):
    if not series:
        Path(path).write_text("")
        return
    keys = sorted({k for row in series for k in row})
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for row in series:
            w.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in keys})
