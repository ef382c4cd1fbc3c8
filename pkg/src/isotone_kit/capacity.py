"""Capacities (normalized monotone set functions) on finite ground sets.

Subsets of ``{0, ..., n-1}`` are encoded as bitmasks with bit ``i`` standing
for element ``i`` (least significant bit is element 0).  A capacity stores
its ``2**n`` values in that order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CapabilityError, DomainError, StructuralError

TOL = 1e-12
MAX_STORAGE_N = 20
MAX_EXHAUSTIVE_N = 14
ENCODING = "bitmask-lsb0"

_GRID = np.linspace(0.0, 1.0, 1001)


def mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def set_to_mask(elements) -> int:
    mask = 0
    for i in elements:
        mask |= 1 << int(i)
    return mask


def subset_sums(weights: Sequence[float]) -> np.ndarray:
    """Return ``s[mask] = sum(weights[i] for i in mask)`` for every bitmask."""
    sums = np.zeros(1)
    for w in weights:
        sums = np.concatenate([sums, sums + w])
    return sums


# -- distortions --------------------------------------------------------------


@dataclass(frozen=True)
class DistortionFn:
    """Nondecreasing concave map of [0, 1] onto itself fixing 0 and 1.

    Use the ``power``, ``piecewise_linear`` and ``table`` constructors; each
    checks the invariants on a 1001-point grid and raises
    :class:`DomainError` on failure.
    """

    kind: str
    alpha: float = 1.0
    knots: tuple[tuple[float, float], ...] = ()
    table: tuple[float, ...] = ()

    @classmethod
    def power(cls, alpha: float) -> "DistortionFn":
        if not 0.0 < alpha <= 1.0:
            raise DomainError(f"power distortion needs alpha in (0, 1], got {alpha}")
        return cls("power", alpha=float(alpha))

    @classmethod
    def identity(cls) -> "DistortionFn":
        return cls.power(1.0)

    @classmethod
    def piecewise_linear(cls, knots) -> "DistortionFn":
        pts = tuple((float(x), float(y)) for x, y in knots)
        if len(pts) < 2:
            raise DomainError("piecewise-linear distortion needs at least two knots")
        xs = [p[0] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("knot abscissas must be strictly increasing")
        if abs(xs[0]) > TOL or abs(xs[-1] - 1.0) > TOL:
            raise DomainError("knots must span [0, 1]")
        u = cls("piecewise-linear", knots=pts)
        u._check()
        return u

    @classmethod
    def from_table(cls, values) -> "DistortionFn":
        """Values on a uniform grid of [0, 1], linearly interpolated."""
        vals = tuple(float(v) for v in values)
        if len(vals) < 2:
            raise DomainError("table distortion needs at least two grid values")
        u = cls("table", table=vals)
        u._check()
        return u

    def __call__(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        if self.kind == "power":
            out = t if self.alpha == 1.0 else np.power(t, self.alpha)
        elif self.kind == "piecewise-linear":
            xs, ys = zip(*self.knots)
            out = np.interp(t, xs, ys)
        else:
            out = np.interp(t, np.linspace(0.0, 1.0, len(self.table)), self.table)
        return out if out.ndim else float(out)

    def _check(self) -> None:
        u = np.asarray(self(_GRID))
        if abs(u[0]) > TOL or abs(u[-1] - 1.0) > TOL:
            raise DomainError("distortion must satisfy u(0)=0 and u(1)=1")
        if np.any(np.diff(u) < -TOL):
            raise DomainError("distortion is not nondecreasing")
        # midpoint concavity over all grid pairs (i, j) whose midpoint is a grid point
        i, j = np.triu_indices(len(u), k=2)
        even = (i + j) % 2 == 0
        i, j = i[even], j[even]
        gap = (u[i] + u[j]) / 2.0 - u[(i + j) // 2]
        if np.any(gap > TOL):
            raise DomainError("distortion is not concave")

    def to_dict(self) -> dict:
        if self.kind == "power":
            return {"kind": "power", "alpha": self.alpha}
        if self.kind == "piecewise-linear":
            return {"kind": "piecewise-linear", "knots": [list(k) for k in self.knots]}
        return {"kind": "table", "values": list(self.table)}

    @classmethod
    def from_dict(cls, d: dict) -> "DistortionFn":
        kind = d.get("kind")
        if kind == "power":
            return cls.power(float(d["alpha"]))
        if kind == "identity":
            return cls.identity()
        if kind == "piecewise-linear":
            return cls.piecewise_linear(d["knots"])
        if kind == "table":
            return cls.from_table(d["values"])
        raise StructuralError(f"unknown distortion kind {kind!r}")

    @classmethod
    def parse(cls, text: str) -> "DistortionFn":
        """Parse the compact CLI form: ``identity``, ``power:0.5``,
        ``pwl:0,0;0.5,0.8;1,1`` or ``table:0,0.6,1``."""
        head, _, rest = text.partition(":")
        try:
            if head == "identity":
                return cls.identity()
            if head == "power":
                return cls.power(float(rest))
            if head == "pwl":
                return cls.piecewise_linear(
                    [tuple(float(v) for v in p.split(",")) for p in rest.split(";")]
                )
            if head == "table":
                return cls.from_table(float(v) for v in rest.split(","))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise StructuralError(f"cannot parse distortion {text!r}: {exc}") from exc
        raise StructuralError(f"unknown distortion {text!r}")


# -- capacities ---------------------------------------------------------------


class Capacity:
    """Set function on the subsets of an ``n``-element ground set.

    Construction only checks the layout; call :func:`validate_capacity` for
    normalization and monotonicity.  Values are stored read-only.
    """

    __slots__ = ("n", "values")

    def __init__(self, n: int, values):
        n = int(n)
        if not 1 <= n <= MAX_STORAGE_N:
            raise StructuralError(f"ground set size must be in [1, {MAX_STORAGE_N}], got {n}")
        vals = np.array(values, dtype=float)
        if vals.shape != (1 << n,):
            raise StructuralError(f"expected {1 << n} values for n={n}, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise StructuralError("capacity values must be finite")
        vals.setflags(write=False)
        self.n = n
        self.values = vals

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __call__(self, mask: int) -> float:
        return float(self.values[mask])

    def __repr__(self) -> str:
        return f"Capacity(n={self.n}, values={self.values.tolist()!r})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Capacity)
            and self.n == other.n
            and np.array_equal(self.values, other.values)
        )

    def permuted(self, perm: Sequence[int]) -> "Capacity":
        """Relabel element ``i`` as ``perm[i]``."""
        new = np.empty_like(self.values)
        for mask in range(1 << self.n):
            new[set_to_mask(perm[i] for i in mask_to_set(mask))] = self.values[mask]
        return Capacity(self.n, new)

    def to_dict(self) -> dict:
        return {"n": self.n, "values": self.values.tolist(), "encoding": ENCODING}

    @classmethod
    def from_dict(cls, d: dict) -> "Capacity":
        if "n" not in d:
            raise StructuralError("capacity file lacks field 'n'")
        if "distorted" in d:
            spec = d["distorted"]
            try:
                weights, dist = spec["weights"], spec["distortion"]
            except KeyError as exc:
                raise StructuralError(f"distorted capacity lacks field {exc}") from None
            cap = distort(weights, DistortionFn.from_dict(dist))
            if cap.n != int(d["n"]):
                raise StructuralError(f"'n'={d['n']} but {cap.n} weights given")
            return cap
        if "values" not in d:
            raise StructuralError("capacity file needs 'values' or 'distorted'")
        enc = d.get("encoding", ENCODING)
        if enc != ENCODING:
            raise StructuralError(f"unsupported encoding {enc!r}")
        return cls(d["n"], d["values"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Capacity":
        return cls.from_dict(json.loads(text))


class ValidationReport(NamedTuple):
    ok: bool
    normalized: bool
    monotone: bool
    reason: str = ""
    pair: tuple[int, int] | None = None  # (subset, superset) masks

    def to_dict(self) -> dict:
        d = {"pass": self.ok, "normalized": self.normalized, "monotone": self.monotone}
        if self.reason:
            d["reason"] = self.reason
        if self.pair is not None:
            d["pair"] = list(self.pair)
        return d


def validate_capacity(c: Capacity) -> ValidationReport:
    """Check normalization and monotonicity of a capacity.

    Monotonicity is checked on (subset, subset plus one element) pairs only,
    which suffices by transitivity.  On failure the first offending pair in
    (element, mask) order is reported.
    """
    v = c.values
    normalized = bool(abs(v[0]) <= TOL and abs(v[c.full] - 1.0) <= TOL)
    reason = ""
    if not normalized:
        reason = f"mu(empty)={v[0]!r}, mu(full)={v[c.full]!r}"
    masks = np.arange(1 << c.n)
    for i in range(c.n):
        bit = 1 << i
        lo = masks[(masks & bit) == 0]
        bad = np.nonzero(v[lo] > v[lo | bit] + TOL)[0]
        if bad.size:
            a = int(lo[bad[0]])
            msg = f"mu({a}) > mu({a | bit})"
            return ValidationReport(False, normalized, False, "; ".join(filter(None, [reason, msg])), (a, a | bit))
    return ValidationReport(normalized, normalized, True, reason)


class SubmodularityResult(NamedTuple):
    ok: bool
    counterexample: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def sets(self):
        if self.counterexample is None:
            return None
        return tuple(mask_to_set(m) for m in self.counterexample)


def submodularity_gaps(c: Capacity, a: int) -> np.ndarray:
    """``mu(A|B) + mu(A&B) - mu(A) - mu(B)`` for fixed ``A`` and every ``B``."""
    v = c.values
    b = np.arange(1 << c.n)
    return v[a | b] + v[a & b] - v[a] - v[b]


def is_submodular(c: Capacity) -> SubmodularityResult:
    """Exhaustive check of mu(A|B) + mu(A&B) <= mu(A) + mu(B) over all pairs."""
    if c.n > MAX_EXHAUSTIVE_N:
        raise CapabilityError(
            f"exhaustive submodularity scan limited to n <= {MAX_EXHAUSTIVE_N}, got n={c.n}"
        )
    for a in range(1 << c.n):
        bad = np.nonzero(submodularity_gaps(c, a) > TOL)[0]
        if bad.size:
            return SubmodularityResult(False, (a, int(bad[0])))
    return SubmodularityResult(True)


def distort(p, u: DistortionFn) -> Capacity:
    """Distorted probability ``mu(S) = u(P(S))``."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError("weights must be a nonempty vector")
    if p.size > MAX_STORAGE_N:
        raise DomainError(f"at most {MAX_STORAGE_N} weights supported")
    if not np.all(np.isfinite(p)) or np.any(p < 0) or abs(p.sum() - 1.0) > TOL:
        raise DomainError("weights must be a probability vector")
    sums = np.clip(subset_sums(p), 0.0, 1.0)
    values = np.asarray(u(sums), dtype=float)
    values[0] = 0.0
    return Capacity(p.size, values)


def uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)
