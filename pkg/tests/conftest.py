import numpy as np
import pytest
from scipy.stats import chi2_contingency


class ScriptedRng:
    """Stand-in generator whose .random() pops a scripted value list."""

    def __init__(self, values):
        self._values = list(values)

    def random(self):
        if not self._values:
            raise AssertionError("scripted rng exhausted: an unexpected draw happened")
        return self._values.pop(0)

    @property
    def remaining(self):
        return len(self._values)


def chi2_homogeneity_pvalue(samples_a, samples_b, min_column_total=10):
    """Two-sample chi-squared p-value over integer-valued samples.

    Sparse tail columns are merged upward until every column's combined
    count reaches ``min_column_total``.
    """
    support = sorted(set(samples_a) | set(samples_b))
    table = np.array(
        [
            [int(np.sum(np.asarray(samples_a) == v)) for v in support],
            [int(np.sum(np.asarray(samples_b) == v)) for v in support],
        ]
    )
    merged = []
    pending = np.zeros(2, dtype=int)
    for column in table.T:
        pending += column
        if pending.sum() >= min_column_total:
            merged.append(pending.copy())
            pending[:] = 0
    if pending.sum():
        if merged:
            merged[-1] += pending
        else:
            merged.append(pending.copy())
    table = np.array(merged).T
    if table.shape[1] < 2:
        return 1.0  # identical single-bucket distributions
    return float(chi2_contingency(table, correction=False).pvalue)
