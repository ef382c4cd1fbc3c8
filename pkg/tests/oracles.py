"""Reference computations that share no code path with the package."""

from __future__ import annotations

import itertools
import math

import numpy as np


def riemann_choquet(f, values, A=None, steps=1_000_000):
    """Midpoint Riemann sum of the two level-set integrals.

    ``values`` is the raw list of 2**n capacity values (bit i = element i).
    """
    f = np.asarray(f, dtype=float)
    n = f.size
    A = (1 << n) - 1 if A is None else A
    values = np.asarray(values, dtype=float)
    lo, hi = min(f.min(), 0.0), max(f.max(), 0.0)
    if hi == lo:
        return 0.0
    h = (hi - lo) / steps
    t = lo + (np.arange(steps) + 0.5) * h
    masks = np.zeros(steps, dtype=np.int64)
    for i in range(n):
        if A >> i & 1:
            masks |= (f[i] >= t).astype(np.int64) << i
    surv = values[masks]
    return float(np.where(t >= 0, surv, surv - values[A]).sum() * h)


def brute_submodular(values, n, tol=1e-12):
    """Plain double loop over all subset pairs; returns first violating pair or None."""
    for a, b in itertools.product(range(1 << n), repeat=2):
        if values[a | b] + values[a & b] > values[a] + values[b] + tol:
            return (a, b)
    return None


def kantorovich_classical(f, n, x):
    """Classical Kantorovich polynomial via adaptive quadrature and math.comb."""
    from scipy.integrate import quad

    means = [(n + 1) * quad(f, k / (n + 1), (k + 1) / (n + 1), epsabs=1e-13)[0] for k in range(n + 1)]
    return sum(means[k] * math.comb(n, k) * x**k * (1 - x) ** (n - k) for k in range(n + 1))
