"""Scripted demonstrations backing the ``choquet-demo`` and ``sym-demo`` commands."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .capacity import Capacity, is_submodular
from .choquet import choquet_sorted
from .errors import DomainError, PreconditionError, StructuralError
from . import matrix_order as mo

TANGENCY_TOL = 1e-10
DOMINATION_TOL = 1e-10


def tangent_weights(c: Capacity, h) -> np.ndarray:
    """Weights of the linear functional tangent to the Choquet integral at ``h``.

    With ``h`` sorted in decreasing order, element ``i`` of rank ``r`` gets
    ``mu(top r) - mu(top r-1)``.  Requires distinct values in ``h``.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (c.n,):
        raise StructuralError(f"function has shape {h.shape}, expected ({c.n},)")
    if np.unique(h).size != h.size:
        raise DomainError("tangent functional is not canonical when h has ties")
    order = np.argsort(-h, kind="stable")
    mu = c.values[np.cumsum(1 << order)]
    w = np.empty(c.n)
    w[order] = np.diff(mu, prepend=0.0)
    return w


@dataclass
class MinorantReport:
    weights: list[np.ndarray]
    tangency_error: list[float]
    domination_excess: list[float]
    probes: int
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = (
            max(self.tangency_error, default=0.0) <= TANGENCY_TOL
            and max(self.domination_excess, default=0.0) <= DOMINATION_TOL
            and all(np.all(w >= 0) and abs(w.sum() - 1.0) <= 1e-12 for w in self.weights)
        )

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "probes": self.probes,
            "coordinates": [
                {
                    "weights": w.tolist(),
                    "weight_sum": float(w.sum()),
                    "tangency_error": t,
                    "max_domination_excess": d,
                }
                for w, t, d in zip(self.weights, self.tangency_error, self.domination_excess)
            ],
        }


def tangent_minorant(
    capacities: Sequence[Capacity], h, probes: int = 1000, seed: int = 42
) -> MinorantReport:
    """Positive linear ``T <= P`` with ``T(h) = P(h)``, where ``P`` stacks the
    Choquet integrals of the given submodular capacities.

    ``h`` must be nonnegative with distinct values.  Domination is probed on
    random nonnegative functions.
    """
    if not capacities:
        raise StructuralError("need at least one capacity")
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise DomainError("h must be nonnegative")
    for idx, c in enumerate(capacities):
        sub = is_submodular(c)
        if not sub:
            raise PreconditionError(f"capacity {idx} is not submodular: pair {sub.counterexample}")
    rng = np.random.default_rng(seed)
    n = capacities[0].n
    if any(c.n != n for c in capacities):
        raise StructuralError("capacities must share the ground set")
    F = rng.uniform(0.0, 1.0, (probes, n)) * rng.choice([1.0, 10.0], (probes, 1))
    weights, tang, dom = [], [], []
    for c in capacities:
        w = tangent_weights(c, h)
        weights.append(w)
        tang.append(abs(float(w @ h) - choquet_sorted(h, c)))
        excess = max((float(w @ f) - choquet_sorted(f, c) for f in F), default=0.0)
        dom.append(max(0.0, excess))
    return MinorantReport(weights, tang, dom, probes)


def symmetric_demo(dim: int = 4, trials: int = 200, seed: int = 42, p: float = 0.5) -> dict:
    """Subgradients of the largest-eigenvalue operator on a sample matrix plus
    the randomized property suites."""
    rng = np.random.default_rng(seed)
    A = mo.random_symmetric(rng, dim)
    T = mo.lambda1_subgradient(A)
    diag = mo.diag_functional(dim)
    suite = mo.check_lambda1_suite(dim, trials, seed)
    weyl = mo.check_weyl_properties(dim, trials, seed)
    heinz = mo.check_loewner_heinz(dim, p, trials, seed)
    return {
        "matrix": mo.matrix_to_dict(A),
        "lambda1": float(mo.lambda_max(A)),
        "subgradient_vector": T.weights[0].tolist(),
        "subgradient_at_A": T(A).tolist(),
        "subgradient_in_support": mo.is_in_lambda1_support(T),
        "diag_in_support": mo.is_in_lambda1_support(diag),
        "lambda1_suite": suite.to_dict(),
        "weyl": weyl.to_dict(),
        "loewner_heinz": {"p": p, **heinz.to_dict()},
        "pass": bool(
            suite.passed and weyl.passed and heinz.passed and mo.is_in_lambda1_support(diag)
        ),
    }
