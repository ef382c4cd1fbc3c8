"""Isotonicity certification for max-affine convex maps R^n -> R^m.

Each component ``Phi_j(x) = max_k (a_jk . x + b_jk)`` is convex, and the
gradient of any piece that is active somewhere is a subgradient there.  A
continuous convex map on the whole space is isotone exactly when all its
subgradients are positive operators, so for max-affine maps it suffices to
check that every piece which is ever active has a nonnegative gradient.
In cone mode activity is tested on ``{x >= eps}``; isotonicity on the
interior of the orthant extends to its closure by continuity.

Every verdict carries evidence: a per-piece certificate, or a pair
``x <= y`` with ``Phi_j(x) > Phi_j(y)`` that has been re-evaluated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NumericalError, StructuralError
from .simplex import linprog

CONE_EPS = 1e-6
BOX = 1e6
ACTIVE_TOL = 1e-9
WITNESS_TOL = 1e-9
COMBINATION_TOL = 1e-9


@dataclass(frozen=True)
class MaxAffineMap:
    """Componentwise maximum of affine pieces.

    ``gradients[j]`` has shape ``(pieces_j, input_dim)`` and ``offsets[j]``
    shape ``(pieces_j,)``.
    """

    input_dim: int
    gradients: tuple[np.ndarray, ...]
    offsets: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.input_dim < 1:
            raise StructuralError("input_dim must be positive")
        if len(self.gradients) == 0 or len(self.gradients) != len(self.offsets):
            raise StructuralError("map needs at least one component and matching offsets")
        grads, offs = [], []
        for j, (a, b) in enumerate(zip(self.gradients, self.offsets)):
            a = np.array(a, dtype=float)
            b = np.array(b, dtype=float).ravel()
            if a.size == 0 or b.size == 0:
                raise StructuralError(f"component {j} has no pieces")
            a = a.reshape(-1, self.input_dim) if a.ndim == 1 and a.size == self.input_dim else a
            if a.ndim != 2 or a.shape[1] != self.input_dim:
                raise StructuralError(f"component {j}: gradients must have length {self.input_dim}")
            if a.shape[0] != b.size:
                raise StructuralError(f"component {j}: {a.shape[0]} gradients but {b.size} offsets")
            if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
                raise StructuralError(f"component {j}: non-finite coefficients")
            a.setflags(write=False)
            b.setflags(write=False)
            grads.append(a)
            offs.append(b)
        object.__setattr__(self, "gradients", tuple(grads))
        object.__setattr__(self, "offsets", tuple(offs))

    @classmethod
    def from_pieces(cls, input_dim: int, components) -> "MaxAffineMap":
        """``components`` is a list (per output) of ``(a, b)`` pairs."""
        comps = [list(c) for c in components]
        if any(len(c) == 0 for c in comps):
            raise StructuralError("every component needs at least one piece")
        return cls(
            input_dim,
            tuple(np.array([p[0] for p in c], dtype=float).reshape(len(c), -1) for c in comps),
            tuple(np.array([p[1] for p in c], dtype=float) for c in comps),
        )

    @property
    def output_dim(self) -> int:
        return len(self.gradients)

    def piece_values(self, j: int, x) -> np.ndarray:
        return self.gradients[j] @ np.asarray(x, dtype=float) + self.offsets[j]

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return np.array([np.max(self.piece_values(j, x)) for j in range(self.output_dim)])
        # batch of points, shape (N, n) -> (N, m)
        return np.stack(
            [np.max(x @ a.T + b, axis=1) for a, b in zip(self.gradients, self.offsets)], axis=1
        )

    def scaled(self, j: int, c: float) -> "MaxAffineMap":
        grads = list(self.gradients)
        offs = list(self.offsets)
        grads[j] = grads[j] * c
        offs[j] = offs[j] * c
        return MaxAffineMap(self.input_dim, tuple(grads), tuple(offs))

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "components": [
                {"pieces": [{"a": ai.tolist(), "b": float(bi)} for ai, bi in zip(a, b)]}
                for a, b in zip(self.gradients, self.offsets)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MaxAffineMap":
        try:
            n = int(d["input_dim"])
            comps = d["components"]
            pieces = [[(p["a"], p["b"]) for p in comp["pieces"]] for comp in comps]
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed map: missing or invalid field {exc}") from None
        for j, comp in enumerate(pieces):
            for k, (a, _) in enumerate(comp):
                if len(a) != n:
                    raise StructuralError(
                        f"components[{j}].pieces[{k}].a has length {len(a)}, expected {n}"
                    )
        return cls.from_pieces(n, pieces)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MaxAffineMap":
        return cls.from_dict(json.loads(text))


# -- LP building blocks -------------------------------------------------------


class PositiveCombination(NamedTuple):
    weights: np.ndarray
    combination: np.ndarray


def lp_feasible_positive_combination(vectors: Sequence) -> PositiveCombination | None:
    """Find convex weights whose combination of ``vectors`` is entrywise >= 0.

    Returns ``None`` when the phase-1 optimum certifies that the convex hull
    misses the nonnegative orthant.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.size == 0:
        raise StructuralError("need at least one vector")
    k = V.shape[0]
    res = linprog(np.zeros(k), A_ub=-V.T, b_ub=np.zeros(V.shape[1]), A_eq=np.ones((1, k)), b_eq=[1.0])
    if res.status != "optimal":
        return None
    w = np.maximum(res.x, 0.0)
    w /= w.sum()
    comb = w @ V
    if np.any(comb < -COMBINATION_TOL):
        return None
    return PositiveCombination(w, comb)


class Activity(NamedTuple):
    active: bool
    point: np.ndarray | None
    slack: float  # max over the region of min_l (piece_k - piece_l), capped at 1


def _distinct_rivals(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    same = np.all(a == a[k], axis=1) & (b == b[k])
    return np.nonzero(~same)[0]


def piece_ever_active(
    fmap: MaxAffineMap,
    component: int,
    piece: int,
    cone_restricted: bool = False,
    eps: float = CONE_EPS,
    box: float = BOX,
) -> Activity:
    """Decide whether piece ``piece`` attains the maximum of ``component`` somewhere.

    The region is the box ``|x_i| <= box`` (whole-space mode) or
    ``eps <= x_i <= box`` (cone mode).  Maximizes the activity slack
    ``min_l (a_k - a_l).x + (b_k - b_l)``, capped at 1, and returns the
    maximizer.  Pieces identical to ``piece`` are not treated as rivals.
    """
    a, b = fmap.gradients[component], fmap.offsets[component]
    if not 0 <= piece < a.shape[0]:
        raise StructuralError(f"piece index {piece} out of range")
    n = fmap.input_dim
    rivals = _distinct_rivals(a, b, piece)
    if rivals.size == 0:
        x = np.full(n, eps) if cone_restricted else np.zeros(n)
        return Activity(True, x, 1.0)
    d = a[piece] - a[rivals]  # (r, n)
    db = b[piece] - b[rivals]
    r = rivals.size
    # variables: x-part then s' >= 0 with slack s = 1 - s'; constraint d.x + db >= 1 - s'
    if cone_restricted:
        # x = eps + z, 0 <= z <= box - eps
        A_ub = np.hstack([-d, -np.ones((r, 1))])
        b_ub = db - 1.0 + eps * d.sum(axis=1)
        bounds = np.hstack([np.eye(n), np.zeros((n, 1))])
        bound_rhs = np.full(n, box - eps)
    else:
        # x = x+ - x-, 0 <= x+, x- <= box
        A_ub = np.hstack([-d, d, -np.ones((r, 1))])
        b_ub = db - 1.0
        bounds = np.hstack([np.eye(2 * n), np.zeros((2 * n, 1))])
        bound_rhs = np.full(2 * n, box)
    nv = A_ub.shape[1]
    cost = np.zeros(nv)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=np.vstack([A_ub, bounds]), b_ub=np.concatenate([b_ub, bound_rhs]))
    if res.status != "optimal":
        raise NumericalError(f"activity LP ended with status {res.status}")
    z = res.x
    x = eps + z[:n] if cone_restricted else z[:n] - z[n : 2 * n]
    # re-measure slack at the returned point rather than trusting the tableau
    slack = float(min(1.0, np.min(d @ x + db)))
    active = slack >= -ACTIVE_TOL
    return Activity(active, x if active else None, slack)


# -- certification ------------------------------------------------------------


class PieceStatus(NamedTuple):
    piece: int
    active: bool
    nonnegative: bool


@dataclass
class IsotonicityVerdict:
    verdict: str  # "certified" or "violated"
    cone_restricted: bool
    certificate: list[list[PieceStatus]] | None = None
    witness: dict | None = None

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_dict(self) -> dict:
        d: dict = {"verdict": self.verdict, "cone_restricted": self.cone_restricted}
        if self.certificate is not None:
            d["certificate"] = [
                [{"piece": p.piece, "active": p.active, "gradient_nonnegative": p.nonnegative} for p in comp]
                for comp in self.certificate
            ]
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def _line_search_witness(fmap, j, k, x, slack) -> dict | None:
    """Push ``x`` up along a coordinate where piece ``k`` has negative slope."""
    a = fmap.gradients[j]
    fx = float(np.max(fmap.piece_values(j, x)))
    best = None
    for i in np.argsort(a[k]):
        if a[k, i] >= 0:
            break
        spread = float(np.max(np.abs(a[k, i] - a[:, i])))
        t = slack / (2.0 * spread) if spread > 0 else 1.0
        for _ in range(80):
            y = x.copy()
            y[i] += t
            gap = fx - float(np.max(fmap.piece_values(j, y)))
            if best is None or gap > best[0]:
                best = (gap, y)
            elif gap < best[0]:
                break  # convex along the ray: past the minimum
            t *= 2.0
    if best is None or best[0] <= WITNESS_TOL:
        return None
    y = best[1]
    return {
        "component": int(j),
        "piece": int(k),
        "x": x.tolist(),
        "y": y.tolist(),
        "phi_x": fx,
        "phi_y": float(np.max(fmap.piece_values(j, y))),
        "gap": float(best[0]),
    }


def certify_isotone(fmap: MaxAffineMap, cone_restricted: bool = False) -> IsotonicityVerdict:
    """Certify ``x <= y => Phi(x) <= Phi(y)`` or return a validated counterexample.

    Whole-space mode checks order preservation on R^n, cone mode on the
    nonnegative orthant.
    """
    certificate: list[list[PieceStatus]] = []
    offenders: list[tuple[int, int, Activity]] = []
    for j, a in enumerate(fmap.gradients):
        comp = []
        for k in range(a.shape[0]):
            act = piece_ever_active(fmap, j, k, cone_restricted)
            nonneg = bool(np.all(a[k] >= 0))
            comp.append(PieceStatus(k, act.active, nonneg))
            if act.active and not nonneg:
                offenders.append((j, k, act))
        certificate.append(comp)
    if not offenders:
        return IsotonicityVerdict("certified", cone_restricted, certificate=certificate)
    # strictly active pieces give the cleanest witnesses
    for j, k, act in sorted(offenders, key=lambda o: -o[2].slack):
        if act.slack <= 0:
            continue
        w = _line_search_witness(fmap, j, k, act.point, act.slack)
        if w is not None and _validate_witness(fmap, w, cone_restricted):
            return IsotonicityVerdict("violated", cone_restricted, witness=w)
    raise NumericalError("map has an active negative gradient but no witness above tolerance was found")


def _validate_witness(fmap: MaxAffineMap, w: dict, cone_restricted: bool) -> bool:
    x, y = np.array(w["x"]), np.array(w["y"])
    if np.any(x > y):
        return False
    if cone_restricted and np.any(x < 0):
        return False
    j = w["component"]
    return float(fmap(x)[j] - fmap(y)[j]) > WITNESS_TOL


# -- pointwise subgradients ---------------------------------------------------


@dataclass
class PointwiseSubgradient:
    ok: bool
    matrix: np.ndarray | None = None  # rows = positive subgradient of each component
    weights: list[np.ndarray] = field(default_factory=list)
    active_sets: list[np.ndarray] = field(default_factory=list)
    failed_component: int | None = None
    max_probe_violation: float = 0.0


def active_pieces(fmap: MaxAffineMap, j: int, x0, tol: float = ACTIVE_TOL) -> np.ndarray:
    vals = fmap.piece_values(j, x0)
    top = float(np.max(vals))
    return np.nonzero(vals >= top - tol * max(1.0, abs(top)))[0]


def pointwise_positive_subgradient(
    fmap: MaxAffineMap, x0, probes: int = 100, seed: int = 0
) -> PointwiseSubgradient:
    """Look for a positive element of the subdifferential at ``x0``.

    Per component, the subdifferential is the convex hull of the active
    gradients; an LP decides whether it meets the nonnegative orthant.  On
    success the subgradient inequality is re-checked at random probes.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (fmap.input_dim,):
        raise StructuralError(f"point has shape {x0.shape}, expected ({fmap.input_dim},)")
    rows, weights, sets = [], [], []
    for j, a in enumerate(fmap.gradients):
        act = active_pieces(fmap, j, x0)
        comb = lp_feasible_positive_combination(a[act])
        sets.append(act)
        if comb is None:
            return PointwiseSubgradient(False, active_sets=sets, failed_component=j)
        weights.append(comb.weights)
        rows.append(comb.combination)
    T = np.array(rows)
    rng = np.random.default_rng(seed)
    X = x0 + rng.normal(0.0, 1.0 + np.abs(x0).max(), (probes, fmap.input_dim))
    lhs = fmap(X)
    rhs = fmap(x0) + (X - x0) @ T.T
    viol = float(np.max(rhs - lhs, initial=0.0))
    return PointwiseSubgradient(viol <= 1e-8, T, weights, sets, None, viol)


def probe_monotone_pairs(fmap: MaxAffineMap, probes: int, seed: int, cone_restricted: bool) -> float:
    """Largest ``Phi(x) - Phi(y)`` over random pairs ``x <= y`` (0 if none positive)."""
    rng = np.random.default_rng(seed)
    n = fmap.input_dim
    x = rng.uniform(0.0, 3.0, (probes, n)) if cone_restricted else rng.normal(0.0, 3.0, (probes, n))
    step = rng.exponential(1.0, (probes, n)) * (rng.random((probes, n)) < 0.6)
    y = x + step
    return float(np.max(fmap(x) - fmap(y), initial=0.0))
