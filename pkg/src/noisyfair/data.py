"""Labeled datasets, CSV ingestion and train/test splitting."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import (
    ConfigError,
    DataError,
    EmptySplit,
    GroupRangeError,
    MissingColumn,
    ParseError,
    UnknownCategory,
)


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Samples ``(x, z, y)`` with one or more protected attributes.

    ``protected`` has shape ``(n, k)`` for ``k`` attributes; attribute ``a``
    takes values in ``range(n_groups[a])``. Arrays are read-only.
    """

    features: np.ndarray
    protected: np.ndarray
    labels: np.ndarray
    n_groups: tuple

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DataError("features must be a 2-d array")
        Z = np.asarray(self.protected)
        if Z.ndim == 1:
            Z = Z.reshape(-1, 1)
        if Z.size == 0 and Z.shape[0] != X.shape[0]:
            Z = np.zeros((X.shape[0], len(np.atleast_1d(self.n_groups))), dtype=np.int64)
        y = np.asarray(self.labels).ravel()
        n = X.shape[0]
        if Z.shape[0] != n or y.shape[0] != n:
            raise DataError(
                f"length mismatch: features {n}, protected {Z.shape[0]}, labels {y.shape[0]}"
            )
        if np.any((y != 0) & (y != 1)):
            raise DataError("labels must be 0/1")
        if n > 0 and not np.all(np.equal(np.mod(Z, 1), 0)):
            raise GroupRangeError("protected values must be integers")
        n_groups = tuple(int(p) for p in np.atleast_1d(self.n_groups))
        if len(n_groups) != Z.shape[1]:
            raise DataError("n_groups must have one entry per protected attribute")
        for a, p in enumerate(n_groups):
            if p < 1:
                raise DataError("group counts must be positive")
            col = Z[:, a]
            if n and (col.min() < 0 or col.max() >= p):
                raise GroupRangeError(f"attribute {a}: values outside range(0, {p})")
        object.__setattr__(self, "features", _frozen(X, float))
        object.__setattr__(self, "protected", _frozen(Z, np.int64))
        object.__setattr__(self, "labels", _frozen(y, np.int64))
        object.__setattr__(self, "n_groups", n_groups)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def n_attributes(self):
        return self.protected.shape[1]

    def __len__(self):
        return self.n

    def groups(self, attribute=0):
        return self.protected[:, attribute]

    @property
    def group_counts(self):
        return [
            np.bincount(self.protected[:, a], minlength=p) for a, p in enumerate(self.n_groups)
        ]

    def subset(self, index):
        index = np.asarray(index)
        if index.dtype != bool:
            index = index.astype(np.int64)
        return LabeledDataset(
            self.features[index], self.protected[index], self.labels[index], self.n_groups
        )

    def with_protected(self, protected):
        return LabeledDataset(self.features, protected, self.labels, self.n_groups)

    def equals(self, other):
        return (
            self.n_groups == other.n_groups
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.protected, other.protected)
            and np.array_equal(self.labels, other.labels)
        )


def from_arrays(X, y, z, n_groups=None):
    """Build a dataset from array-likes; ``n_groups`` defaults to ``max(z) + 1``."""
    Z = np.asarray(z)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    if n_groups is None:
        n_groups = tuple(int(Z[:, a].max()) + 1 if Z.shape[0] else 2 for a in range(Z.shape[1]))
    return LabeledDataset(np.asarray(X, dtype=float), Z, np.asarray(y), n_groups)


@dataclass(frozen=True)
class ProtectedColumn:
    name: str
    categories: dict

    def __post_init__(self):
        idx = sorted(self.categories.values())
        if idx != list(range(len(idx))):
            raise ConfigError(f"categories of {self.name!r} must map bijectively onto 0..p-1")

    @property
    def n_groups(self):
        return len(self.categories)

    def inverse(self):
        return {v: k for k, v in self.categories.items()}


@dataclass(frozen=True)
class DatasetSchema:
    feature_columns: list
    protected_columns: list
    label_column: str
    positive_label_value: str = "1"
    negative_label_value: str = "0"
    add_intercept: bool = False
    protected_as_feature: bool = False
    intercept_name: str = field(default="intercept", repr=False)

    def __post_init__(self):
        prot = [
            p if isinstance(p, ProtectedColumn) else ProtectedColumn(p["name"], dict(p["categories"]))
            for p in self.protected_columns
        ]
        object.__setattr__(self, "protected_columns", prot)
        object.__setattr__(self, "feature_columns", list(self.feature_columns))
        names = list(self.feature_columns) + [p.name for p in prot] + [self.label_column]
        if len(set(names)) != len(names):
            raise ConfigError("schema column names must be distinct")
        if not prot:
            raise ConfigError("schema needs at least one protected column")
        if self.positive_label_value == self.negative_label_value:
            raise ConfigError("positive and negative label values must differ")

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(
                feature_columns=d["features"],
                protected_columns=d["protected"],
                label_column=d["label"],
                positive_label_value=str(d.get("positive_label", "1")),
                negative_label_value=str(d.get("negative_label", "0")),
                add_intercept=bool(d.get("add_intercept", False)),
                protected_as_feature=bool(d.get("protected_as_feature", False)),
            )
        except KeyError as e:
            raise ConfigError(f"schema is missing key {e}") from None

    def to_dict(self):
        return {
            "features": list(self.feature_columns),
            "protected": [{"name": p.name, "categories": dict(p.categories)} for p in self.protected_columns],
            "label": self.label_column,
            "positive_label": self.positive_label_value,
            "negative_label": self.negative_label_value,
            "add_intercept": self.add_intercept,
            "protected_as_feature": self.protected_as_feature,
        }


def load_csv(path, schema):
    """Read a comma-delimited UTF-8 file with a header row into a dataset.

    Row numbers in errors are 1-based file lines (the header is line 1).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        pos = {name: i for i, name in enumerate(header)}
        wanted = list(schema.feature_columns) + [p.name for p in schema.protected_columns]
        wanted.append(schema.label_column)
        missing = [c for c in wanted if c not in pos]
        if missing:
            raise MissingColumn(f"{path}: missing columns {missing}")

        feats, prot, labels = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(lineno, None, f"expected {len(header)} fields, got {len(row)}")
            x = []
            for c in schema.feature_columns:
                raw = row[pos[c]].strip()
                try:
                    x.append(float(raw))
                except ValueError:
                    raise ParseError(lineno, c, f"not a number: {raw!r}") from None
            z = []
            for p in schema.protected_columns:
                raw = row[pos[p.name]].strip()
                if raw not in p.categories:
                    raise UnknownCategory(lineno, p.name, raw)
                z.append(p.categories[raw])
            raw = row[pos[schema.label_column]].strip()
            if raw == schema.positive_label_value:
                labels.append(1)
            elif raw == schema.negative_label_value:
                labels.append(0)
            else:
                raise ParseError(lineno, schema.label_column, f"unexpected label {raw!r}")
            feats.append(x)
            prot.append(z)

    k = len(schema.protected_columns)
    X = np.array(feats, dtype=float).reshape(len(feats), len(schema.feature_columns))
    Z = np.array(prot, dtype=np.int64).reshape(len(prot), k)
    if schema.protected_as_feature:
        X = np.hstack([X, Z.astype(float)])
    if schema.add_intercept:
        X = np.hstack([np.ones((X.shape[0], 1)), X])
    return LabeledDataset(X, Z, np.array(labels, dtype=np.int64), tuple(p.n_groups for p in schema.protected_columns))


def save_csv(dataset, path, schema):
    """Inverse of :func:`load_csv` for datasets produced under ``schema``."""
    X = dataset.features
    if schema.add_intercept:
        X = X[:, 1:]
    if schema.protected_as_feature:
        X = X[:, : X.shape[1] - dataset.n_attributes]
    if X.shape[1] != len(schema.feature_columns):
        raise DataError("dataset width does not match schema")
    inverses = [p.inverse() for p in schema.protected_columns]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(schema.feature_columns) + [p.name for p in schema.protected_columns] + [schema.label_column])
        for i in range(dataset.n):
            row = [repr(float(v)) for v in X[i]]
            row += [inv[int(z)] for inv, z in zip(inverses, dataset.protected[i])]
            row.append(schema.positive_label_value if dataset.labels[i] == 1 else schema.negative_label_value)
            w.writerow(row)


def split(dataset, train_fraction=0.7, seed=0):
    """Shuffle with ``numpy.random.default_rng(seed)`` and cut at ``floor(n * frac)``."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError("train_fraction must lie in (0, 1)")
    n = dataset.n
    n_train = int(np.floor(n * train_fraction))
    if n_train == 0 or n_train == n:
        raise EmptySplit(f"split of n={n} at {train_fraction} leaves an empty side")
    perm = np.random.default_rng(seed).permutation(n)
    return dataset.subset(perm[:n_train]), dataset.subset(perm[n_train:])
