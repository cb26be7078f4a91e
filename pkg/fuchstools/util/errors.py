#!/usr/bin/env python
import numpy as np
import sklearn.metrics as skm

mad = skm.mean_absolute_error
max_abs_error = skm.max_error


def tv_distance(p, q) -> float:
    """Total-variation distance 0.5 * sum|p - q| between two binned measures
    of equal length."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"Bin counts differ: {p.shape} vs {q.shape}")
    return 0.5 * len(p) * mad(p, q)


def tv_from_uniform(p) -> float:
    """Total-variation distance from the uniform measure of the same mass."""
    p = np.asarray(p, dtype=float)
    return tv_distance(p, np.full_like(p, p.sum() / len(p)))


def worst_signed_slack(values) -> float:
    """Smallest entry of a slack vector; nan-safe, +inf for an empty one."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return float("inf")
    return float(np.nanmin(values))
