"""Gaussian-mixture benchmark data with a tunable statistical-rate disparity."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .data import LabeledDataset
from .exceptions import BadProportions, ConfigError


@dataclass(frozen=True)
class SyntheticSpec:
    """Generator parameters.

    Group ``i`` has mass ``proportions[i]`` and positive-label rate
    ``base_rates[i]``. Features are standard normal around
    ``label_means[y] + group_means[i]``; the first column is a constant 1
    when ``add_intercept`` is set.
    """

    n: int = 4000
    proportions: tuple = (0.5, 0.5)
    base_rates: tuple = (0.3, 0.6)
    label_means: tuple = ((-0.5, -0.5, 0.0), (0.5, 0.5, 0.0))
    group_means: tuple = ((0.0, 0.0, -1.2), (0.0, 0.0, 1.2))
    noise_scale: float = 1.0
    add_intercept: bool = True

    def __post_init__(self):
        props = np.asarray(self.proportions, dtype=float)
        if props.ndim != 1 or props.size < 2 or np.any(props < 0) or abs(props.sum() - 1.0) > 1e-9:
            raise BadProportions(f"group proportions {self.proportions} must be non-negative and sum to 1")
        p = props.size
        if len(self.base_rates) != p or len(self.group_means) != p:
            raise ConfigError("base_rates and group_means need one entry per group")
        if len(self.label_means) != 2:
            raise ConfigError("label_means needs one row per label")
        widths = {len(r) for r in self.label_means} | {len(r) for r in self.group_means}
        if len(widths) != 1:
            raise ConfigError("all mean vectors must share one width")
        if self.n < 0:
            raise ConfigError("n must be non-negative")

    @property
    def p(self):
        return len(self.proportions)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for k in ("proportions", "base_rates"):
            if k in d:
                d[k] = tuple(d[k])
        for k in ("label_means", "group_means"):
            if k in d:
                d[k] = tuple(tuple(r) for r in d[k])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown synthetic options {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        d = asdict(self)
        return {k: (np.asarray(v).tolist() if isinstance(v, tuple) else v) for k, v in d.items()}


def make_synthetic(spec=None, seed=0):
    spec = spec or SyntheticSpec()
    rng = np.random.default_rng(seed)
    n = spec.n
    z = rng.choice(spec.p, size=n, p=np.asarray(spec.proportions, dtype=float))
    y = (rng.random(n) < np.asarray(spec.base_rates)[z]).astype(np.int64)
    lm = np.asarray(spec.label_means, dtype=float)
    gm = np.asarray(spec.group_means, dtype=float)
    X = lm[y] + gm[z] + spec.noise_scale * rng.standard_normal((n, lm.shape[1]))
    if spec.add_intercept:
        X = np.hstack([np.ones((n, 1)), X])
    return LabeledDataset(X, z.reshape(-1, 1), y, (spec.p,))


def synthetic_schema(spec=None):
    """CSV schema matching :func:`make_synthetic` output (columns ``x1..``, ``z``, ``y``)."""
    from .data import DatasetSchema

    spec = spec or SyntheticSpec()
    width = len(spec.label_means[0])
    return DatasetSchema(
        feature_columns=[f"x{j + 1}" for j in range(width)],
        protected_columns=[{"name": "z", "categories": {str(i): i for i in range(spec.p)}}],
        label_column="y",
        add_intercept=spec.add_intercept,
    )
