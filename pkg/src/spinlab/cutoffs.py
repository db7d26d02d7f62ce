"""The two cutoff functions used throughout.

``bump`` is 1 on [0, 1/2] and 0 on [1, ∞); it blends the cylindrical-end
metric and localizes eigenvectors.  ``length_cutoff`` equals t near 0 and 1
for t ≥ 1; it squeezes vectors into the closed unit ball.  Both are built
from the quintic smoothstep and are C².
"""

from __future__ import annotations

import numpy as np

__all__ = ["smoothstep", "smoothstep_prime", "bump", "bump_prime", "length_cutoff", "length_cutoff_prime", "squeeze"]

# ρ(t) = t exactly on [0, LINEAR_END]
LINEAR_END = 0.25


def smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x**3 * (10.0 - 15.0 * x + 6.0 * x * x)


def smoothstep_prime(x):
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    return np.where(inside, 30.0 * x**2 * (1.0 - x) ** 2, 0.0)


def bump(r):
    """1 on [0, ½], 0 on [1, ∞), quintic smoothstep in between."""
    return 1.0 - smoothstep(2.0 * np.asarray(r, dtype=float) - 1.0)


def bump_prime(r):
    return -2.0 * smoothstep_prime(2.0 * np.asarray(r, dtype=float) - 1.0)


def length_cutoff(t):
    """ρ(t) = t + s(u)(1 − t), u = (t − ¼)/¾: the identity near 0, 1 from t = 1 on, monotone."""
    t = np.asarray(t, dtype=float)
    u = (t - LINEAR_END) / (1.0 - LINEAR_END)
    return np.where(t >= 1.0, 1.0, t + smoothstep(u) * (1.0 - t))


def length_cutoff_prime(t):
    t = np.asarray(t, dtype=float)
    u = (t - LINEAR_END) / (1.0 - LINEAR_END)
    d = 1.0 - smoothstep(u) + smoothstep_prime(u) * (1.0 - t) / (1.0 - LINEAR_END)
    return np.where(t >= 1.0, 0.0, d)


def squeeze(v, radius=None):
    """ρ(r)/r · v with r = |v| (or a supplied radius); the factor is 1 at r = 0."""
    v = np.asarray(v, dtype=float)
    r = float(np.linalg.norm(v)) if radius is None else float(radius)
    if r <= LINEAR_END:
        return v.copy()  # ρ(r) = r here, so the ratio is exactly 1
    return (float(length_cutoff(r)) / r) * v
