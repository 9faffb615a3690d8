"""Published results of external noise-tolerant fair classifiers.

These are static numbers attached to reports for comparison only; none of
them is computed by this package. Values are (mean, standard error) over
repetitions with the same split and noise settings (eta0=0.3, eta1=0.1).
"""

NOTE = "published, not computed"

# dataset/attribute -> method -> metric -> (mean, stderr)
PUBLISHED = {
    "adult-sex": {
        "LZMV eps=.01": {"acc": (0.35, 0.01), "sr": (0.99, 0.0), "fpr": (0.99, 0.0)},
        "LZMV eps=.04": {"acc": (0.67, 0.04), "sr": (0.85, 0.06), "fpr": (0.99, 0.01)},
        "LZMV eps=.10": {"acc": (0.78, 0.02), "sr": (0.69, 0.09), "fpr": (0.79, 0.11)},
        "AKM": {"acc": (0.77, 0.0), "sr": (0.66, 0.05), "fpr": (0.89, 0.04)},
        "WGN+": {"acc": (0.70, 0.05), "sr": (0.73, 0.12), "fpr": (0.76, 0.05)},
    },
    "adult-race": {
        "LZMV eps=.01": {"acc": (0.37, 0.05), "sr": (0.98, 0.0), "fpr": (0.99, 0.0)},
        "LZMV eps=.04": {"acc": (0.77, 0.03), "sr": (0.79, 0.10), "fpr": (0.85, 0.09)},
        "LZMV eps=.10": {"acc": (0.80, 0.0), "sr": (0.70, 0.01), "fpr": (0.82, 0.08)},
        "AKM": {"acc": (0.80, 0.0), "sr": (0.72, 0.02), "fpr": (0.90, 0.08)},
        "WGN+": {"acc": (0.76, 0.01), "sr": (0.84, 0.05), "fpr": (0.92, 0.05)},
    },
    "compas-sex": {
        "LZMV eps=.01": {"acc": (0.55, 0.01), "sr": (0.98, 0.04), "fpr": (0.98, 0.09)},
        "LZMV eps=.04": {"acc": (0.58, 0.01), "sr": (0.94, 0.02), "fpr": (0.94, 0.03)},
        "LZMV eps=.10": {"acc": (0.64, 0.02), "sr": (0.85, 0.05), "fpr": (0.81, 0.07)},
        "AKM": {"acc": (0.66, 0.01), "sr": (0.83, 0.04), "fpr": (0.77, 0.09)},
        "WGN+": {"acc": (0.59, 0.01), "sr": (0.90, 0.02), "fpr": (0.84, 0.01)},
    },
    "compas-race": {
        "WGN+": {"acc": (0.56, 0.02), "sr": (0.89, 0.14), "fpr": (0.85, 0.16)},
    },
}


def annotations(key):
    if key not in PUBLISHED:
        return None
    return {
        "note": NOTE,
        "methods": {m: {k: list(v) for k, v in vals.items()} for m, vals in PUBLISHED[key].items()},
    }
