"""External clustering metrics: Hungarian accuracy, NMI, purity and ARI.

Labels may be any hashable values; each side is re-encoded to ``0..k-1``
before the contingency table is built, so every metric is invariant to
renaming classes on either side.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._validation import check_same_length

__all__ = ["EvalReport", "confusion", "hungarian_accuracy", "nmi", "purity", "ari", "evaluate"]


@dataclass(frozen=True)
class EvalReport:
    acc: float
    nmi: float
    pur: float
    ari: float
    confusion: np.ndarray

    def as_dict(self):
        return {"acc": self.acc, "nmi": self.nmi, "pur": self.pur, "ari": self.ari}


def confusion(pred, truth):
    """Contingency counts, rows indexed by truth classes and columns by predicted clusters."""
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    check_same_length(pred, truth)
    if pred.size == 0:
        raise ValueError("cannot evaluate an empty labeling")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    C = np.zeros((t.max() + 1, p.max() + 1), dtype=np.int64)
    np.add.at(C, (t, p), 1)
    return C


def hungarian_accuracy(pred, truth):
    C = confusion(pred, truth)
    rows, cols = linear_sum_assignment(C, maximize=True)
    return float(C[rows, cols].sum() / C.sum())


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth):
    """Mutual information over ``sqrt(H(pred) H(truth))``; 0 when either entropy is 0."""
    C = confusion(pred, truth)
    n = C.sum()
    h_t = _entropy(C.sum(axis=1), n)
    h_p = _entropy(C.sum(axis=0), n)
    if h_t == 0.0 or h_p == 0.0:
        return 0.0
    nz = C > 0
    joint = C[nz] / n
    outer = np.outer(C.sum(axis=1), C.sum(axis=0))[nz] / (n * n)
    mi = float(np.sum(joint * np.log(joint / outer)))
    return float(min(max(mi / np.sqrt(h_t * h_p), 0.0), 1.0))


def purity(pred, truth):
    C = confusion(pred, truth)
    return float(C.max(axis=0).sum() / C.sum())


def _pairs(x):
    x = np.asarray(x, dtype=np.float64)
    return float(np.sum(x * (x - 1.0) / 2.0))


def ari(pred, truth):
    """Adjusted Rand index; identical partitions score 1, including the trivial ones."""
    C = confusion(pred, truth)
    n = C.sum()
    index = _pairs(C)
    a = _pairs(C.sum(axis=1))
    b = _pairs(C.sum(axis=0))
    expected = a * b / _pairs(n) if n > 1 else 0.0
    top = 0.5 * (a + b)
    if top == expected:
        # both partitions trivial in the same way (one cluster, or all singletons)
        return 1.0
    return float((index - expected) / (top - expected))


def evaluate(pred, truth):
    return EvalReport(acc=hungarian_accuracy(pred, truth), nmi=nmi(pred, truth),
                      pur=purity(pred, truth), ari=ari(pred, truth),
                      confusion=confusion(pred, truth))
