"""Bernstein-Kantorovich-Choquet approximation on [0, 1].

For a distorted Lebesgue capacity ``mu = u o lambda`` the degree-``n``
operator replaces each cell mean of the classical Kantorovich polynomial by
the Choquet mean over the cell ``[k/(n+1), (k+1)/(n+1)]``:

    K(f)(x) = sum_k [(C) int_cell_k f dmu / mu(cell_k)] * C(n, k) x^k (1-x)^(n-k)
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .capacity import DistortionFn
from .choquet import choquet_interval
from .errors import DegenerateCapacityError, DomainError


def _default_grid() -> np.ndarray:
    return np.linspace(0.0, 1.0, 201)


@dataclass
class BkcConfig:
    n: int
    u: DistortionFn = field(default_factory=DistortionFn.identity)
    m: int = 10_000
    eval_grid: np.ndarray = field(default_factory=_default_grid)

    def __post_init__(self):
        self.eval_grid = np.asarray(self.eval_grid, dtype=float).ravel()
        if self.n < 1:
            raise DomainError(f"degree must be >= 1, got {self.n}")
        if self.m < 8:
            raise DomainError(f"need at least 8 samples per cell, got {self.m}")
        if self.eval_grid.size == 0 or self.eval_grid.min() < 0.0 or self.eval_grid.max() > 1.0:
            raise DomainError("evaluation grid must be a nonempty subset of [0, 1]")


class BkcResult(NamedTuple):
    x: np.ndarray
    values: np.ndarray

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.values.tolist()))


def bernstein_weights(n: int, x) -> np.ndarray:
    """Bernstein basis ``C(n,k) x^k (1-x)^(n-k)``, shape ``(n + 1, len(x))``.

    The ratio recurrence between consecutive terms is accumulated in log
    space, so no binomial coefficients are formed and the leading term
    cannot underflow at large degree.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    # reflect to y <= 1/2 and flip those columns back at the end
    high = x > 0.5
    y = np.where(high, 1.0 - x, x)
    k = np.arange(n, dtype=float)
    log_binom_step = np.concatenate([[0.0], np.cumsum(np.log((n - k) / (k + 1)))])
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = (
            log_binom_step[:, None]
            + np.arange(n + 1)[:, None] * np.log(y)[None, :]
            + (n - np.arange(n + 1))[:, None] * np.log1p(-y)[None, :]
        )
    # y = 0 gives 0 * -inf at k = 0
    log_w[0, y == 0] = 0.0
    w = np.exp(log_w)
    w[:, high] = w[::-1, high]
    return w


def cell_means(f, cfg: BkcConfig) -> np.ndarray:
    """Choquet mean of ``f`` on each of the ``n + 1`` cells.

    ``f`` is a callable on [0, 1] or an array of ``(n + 1) * m`` samples
    taken at the cell-midpoint grid (cell-major order).
    """
    n1 = cfg.n + 1
    denom = float(cfg.u(1.0 / n1))
    if denom == 0.0:
        raise DegenerateCapacityError(f"u(1/{n1}) = 0; cell capacity vanishes")
    if not callable(f):
        samples = np.asarray(f, dtype=float)
        if samples.size != n1 * cfg.m:
            raise DomainError(f"expected {n1 * cfg.m} samples, got {samples.size}")
        samples = samples.reshape(n1, cfg.m)
    means = np.empty(n1)
    for k in range(n1):
        a, b = k / n1, (k + 1) / n1
        src = f if callable(f) else samples[k]
        means[k] = choquet_interval(src, cfg.u, a, min(b, 1.0), cfg.m) / denom
    return means


def bkc_apply(f, cfg: BkcConfig) -> BkcResult:
    """Evaluate ``K_{n,mu}(f)`` on ``cfg.eval_grid``."""
    means = cell_means(f, cfg)
    w = bernstein_weights(cfg.n, cfg.eval_grid)
    return BkcResult(cfg.eval_grid.copy(), means @ w)


class ErrorRow(NamedTuple):
    n: int
    sup_error: float


def bkc_error_table(
    f: Callable[[np.ndarray], np.ndarray],
    u: DistortionFn | None = None,
    degrees: Sequence[int] = (4, 16, 64),
    m: int = 10_000,
    eval_grid=None,
) -> list[ErrorRow]:
    """Sup-norm error of ``K_{n,mu} f`` against ``f`` on the grid, one row per degree."""
    u = DistortionFn.identity() if u is None else u
    grid = _default_grid() if eval_grid is None else np.asarray(eval_grid, dtype=float)
    target = np.broadcast_to(np.asarray(f(grid), dtype=float), grid.shape)
    rows = []
    for n in sorted(degrees):
        res = bkc_apply(f, BkcConfig(n, u, m, grid))
        rows.append(ErrorRow(n, float(np.max(np.abs(res.values - target)))))
    return rows


def error_table_csv(rows: Sequence[ErrorRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "sup_error"])
    for r in rows:
        w.writerow([r.n, repr(r.sup_error)])
    return buf.getvalue()


# Named test functions selectable from the command line.
FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "one": lambda t: np.ones_like(t),
    "identity": lambda t: t,
    "square": lambda t: t * t,
    "sin": lambda t: np.sin(2.0 * np.pi * t),
    "abs-centered": lambda t: np.abs(t - 0.5),
    "sqrt": np.sqrt,
}
