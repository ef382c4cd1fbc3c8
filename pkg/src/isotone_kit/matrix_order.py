"""Symmetric matrices under the Loewner order.

Covers the largest-eigenvalue operator ``Phi(A) = lambda_1(A) * 1`` and its
subgradients, membership in its support (positive trace-one functionals),
spectral powers, the Weyl and Loewner-Heinz inequalities, and the
positive-part operator ``x -> A x^+`` on R^n.

All eigen-decompositions go through a cyclic Jacobi solver so that the
checks do not depend on an external LAPACK.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, NumericalError, PreconditionError, StructuralError
from .reports import PropertyReport

SYM_TOL = 1e-12
JACOBI_THRESHOLD = 1e-13
JACOBI_MAX_SWEEPS = 100


def _fro(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(a * a)))


def as_symmetric(A) -> np.ndarray:
    """Return ``A`` as a float array after checking it is square and symmetric."""
    a = np.asarray(A, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix entries must be finite")
    if np.max(np.abs(a - a.T), initial=0.0) > SYM_TOL * max(1.0, _fro(a)):
        raise DomainError("matrix is not symmetric")
    return a


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray  # nonincreasing
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def eigen_decompose(A) -> EigenSystem:
    """Eigenvalues (nonincreasing) and orthonormal eigenvectors by cyclic Jacobi.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``1e-13 * ||A||_F``.  Each eigenvector is signed so that its first
    entry of magnitude above 1e-12 is positive.
    """
    a = as_symmetric(A).copy()
    n = a.shape[0]
    v = np.eye(n)
    thresh = JACOBI_THRESHOLD * _fro(a)
    for _ in range(JACOBI_MAX_SWEEPS + 1):
        off = _fro(a - np.diag(np.diag(a)))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                d = a[q, q] - a[p, p]
                if abs(apq) <= 1e-18 * abs(d):
                    t = apq / d  # small-angle limit, avoids overflow in tau
                else:
                    tau = d / (2.0 * apq)
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise NumericalError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")
    lam, v = lam[order], v[:, order]
    for j in range(n):
        big = np.nonzero(np.abs(v[:, j]) > 1e-12)[0]
        if big.size and v[big[0], j] < 0:
            v[:, j] = -v[:, j]
    return EigenSystem(lam, v)


def eigenvalues(A) -> np.ndarray:
    return eigen_decompose(A).eigenvalues


def lambda_max(A) -> float:
    return float(eigenvalues(A)[0])


def lambda_min(A) -> float:
    return float(eigenvalues(A)[-1])


def operator_norm(A) -> float:
    """Spectral norm of a symmetric matrix (largest absolute eigenvalue)."""
    lam = eigenvalues(A)
    return float(max(abs(lam[0]), abs(lam[-1])))


def psd_defect(A) -> float:
    """``max(0, -lambda_min(A)) / max(1, ||A||_F)``: 0 iff ``A`` is PSD."""
    a = as_symmetric(A)
    return max(0.0, -lambda_min(a)) / max(1.0, _fro(a))


def loewner_leq(A, B, tol: float = 1e-10) -> bool:
    """``A <= B`` in the Loewner order, i.e. ``lambda_min(B - A) >= -tol * max(1, ||B - A||_F)``."""
    a, b = as_symmetric(A), as_symmetric(B)
    if a.shape != b.shape:
        raise StructuralError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return psd_defect(b - a) <= tol


# -- largest eigenvalue operator ---------------------------------------------


def lambda1_operator(A) -> np.ndarray:
    """``Phi(A) = lambda_1(A) * (1, ..., 1)`` in R^n."""
    a = as_symmetric(A)
    return np.full(a.shape[0], lambda_max(a))


@dataclass(frozen=True)
class SupportFunctional:
    """Linear map Sym(n) -> R^m, ``T(B)_j = <W_j, B>`` (trace pairing)."""

    weights: np.ndarray  # shape (m, n, n)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 3 or w.shape[1] != w.shape[2]:
            raise StructuralError(f"weights must have shape (m, n, n), got {w.shape}")
        for wj in w:
            as_symmetric(wj)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def __call__(self, B) -> np.ndarray:
        b = as_symmetric(B)
        if b.shape[0] != self.dim:
            raise StructuralError(f"functional acts on {self.dim}x{self.dim} matrices")
        return np.einsum("jik,ik->j", self.weights, b)

    @classmethod
    def uniform(cls, W, m: int) -> "SupportFunctional":
        """Same matrix ``W`` in every output coordinate."""
        return cls(np.repeat(np.asarray(W, dtype=float)[None], m, axis=0))


def diag_functional(n: int) -> SupportFunctional:
    """``B -> diag(B)``, i.e. ``W_j = e_j e_j^T``."""
    w = np.zeros((n, n, n))
    w[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    return SupportFunctional(w)


def lambda1_subgradient(A) -> SupportFunctional:
    """Rayleigh subgradient ``T(B) = <B v, v> * 1`` for a unit top eigenvector ``v``.

    At a repeated top eigenvalue this is one element of the subdifferential
    (the first Jacobi eigenvector), not the whole set.
    """
    return _rayleigh(eigen_decompose(A))


def _rayleigh(es: EigenSystem) -> SupportFunctional:
    v = es.eigenvectors[:, 0]
    return SupportFunctional.uniform(np.outer(v, v), v.size)


def is_in_lambda1_support(T: SupportFunctional, tol: float = 1e-9) -> bool:
    """Positive (every ``W_j`` PSD) and unital (every trace 1)."""
    seen = None
    for wj in T.weights:
        if seen is not None and np.array_equal(wj, seen):
            continue
        seen = wj
        if psd_defect(wj) > tol or abs(np.trace(wj) - 1.0) > tol:
            return False
    return True


# -- spectral calculus --------------------------------------------------------


def spectral_apply(A, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    es = eigen_decompose(A)
    q = es.eigenvectors
    return (q * fn(es.eigenvalues)) @ q.T


def _power(A, p: float) -> np.ndarray:
    es = eigen_decompose(A)
    lo = es.eigenvalues[-1]
    if lo < -1e-10:
        raise DomainError(f"matrix has negative eigenvalue {lo}; power undefined")
    q = es.eigenvectors
    return (q * np.power(np.clip(es.eigenvalues, 0.0, None), p)) @ q.T


def matrix_power(A, p: float) -> np.ndarray:
    """``A^p`` for positive semidefinite ``A`` and ``p`` in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    return _power(A, p)


# -- property suites ----------------------------------------------------------


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(0.0, scale, (n, n))
    return (g + g.T) / 2.0


def random_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    h = rng.normal(0.0, 1.0, (n, rank or n)) / np.sqrt(n)
    return h @ h.T


def _excess(lhs, rhs) -> float:
    """Largest amount by which ``lhs <= rhs`` fails componentwise."""
    return float(np.max(np.asarray(lhs) - np.asarray(rhs), initial=0.0))


def check_weyl_properties(dim: int, trials: int = 200, seed: int = 42, tol: float = 1e-9) -> PropertyReport:
    """Eigenvalue monotonicity along ``A <= A + PSD`` and the perturbation bound
    ``max_k |lambda_k(A) - lambda_k(B)| <= ||A - B||``."""
    rng = np.random.default_rng(seed)
    rep = PropertyReport(tol)
    for _ in range(trials):
        A = random_symmetric(rng, dim)
        B = A + random_psd(rng, dim, rank=int(rng.integers(1, dim + 1)))
        rep.record("weyl_monotonicity", _excess(eigenvalues(A), eigenvalues(B)), {"A": A.tolist(), "B": B.tolist()})
        C = random_symmetric(rng, dim)
        gap = np.max(np.abs(eigenvalues(A) - eigenvalues(C)))
        rep.record("weyl_perturbation", gap - operator_norm(A - C), {"A": A.tolist(), "B": C.tolist()})
    return rep


def check_lambda1_suite(dim: int, trials: int = 200, seed: int = 42, tol: float = 1e-8) -> PropertyReport:
    """Everything the largest-eigenvalue operator should satisfy on random pairs.

    Subgradient sandwich ``T(B-A) <= Phi(B)-Phi(A) <= S(B-A)``, sublinearity,
    isotonicity, the Weyl inequalities, tangency ``T(A) = Phi(A)``,
    domination ``T(B) <= Phi(B)`` and support membership of ``T``.
    Violations of size-dependent inequalities are measured relative to
    ``max(1, ||A||_F + ||B||_F)``.
    """
    rng = np.random.default_rng(seed)
    rep = PropertyReport(tol)
    for _ in range(trials):
        A = random_symmetric(rng, dim)
        B = random_symmetric(rng, dim, scale=float(rng.uniform(0.1, 3.0)))
        scale = max(1.0, _fro(A) + _fro(B))
        w = {"A": A.tolist(), "B": B.tolist()}
        ea, eb = eigen_decompose(A), eigen_decompose(B)
        pa, pb = np.full(dim, ea.eigenvalues[0]), np.full(dim, eb.eigenvalues[0])
        T = _rayleigh(ea)
        S = _rayleigh(eb)
        D = B - A
        rep.record("sandwich_lower", _excess(T(D), pb - pa) / scale, w)
        rep.record("sandwich_upper", _excess(pb - pa, S(D)) / scale, w)
        rep.record("subadditivity", _excess(lambda1_operator(A + B), pa + pb) / scale, w)
        c = float(rng.uniform(0.0, 4.0))
        rep.record("positive_homogeneity", float(np.max(np.abs(lambda1_operator(c * A) - c * pa))) / scale, {**w, "c": c})
        P = A + random_psd(rng, dim, rank=int(rng.integers(1, dim + 1)))
        lp = eigenvalues(P)
        wp = {"A": A.tolist(), "B": P.tolist()}
        rep.record("isotonicity", _excess(pa, np.full(dim, lp[0])) / scale, wp)
        rep.record("weyl_monotonicity", _excess(ea.eigenvalues, lp) / scale, wp)
        gap = float(np.max(np.abs(ea.eigenvalues - eb.eigenvalues)))
        rep.record("weyl_perturbation", (gap - operator_norm(D)) / scale, w)
        rep.record("tangency", float(np.max(np.abs(T(A) - pa))) / scale, w)
        rep.record("domination", _excess(T(B), pb) / scale, w)
        rep.record("support_membership", 0.0 if is_in_lambda1_support(T, tol) else 1.0, w)
    return rep


def check_loewner_heinz(dim: int, p: float, trials: int = 200, seed: int = 42, tol: float = 1e-8) -> PropertyReport:
    """Order preservation ``A <= B  =>  A^p <= B^p`` on random PSD pairs.

    Any ``p > 0`` is accepted so that the suite can also exhibit failures for
    exponents outside (0, 1].  The violation is :func:`psd_defect` of
    ``B^p - A^p``.
    """
    if p <= 0:
        raise DomainError("exponent must be positive")
    rng = np.random.default_rng(seed)
    rep = PropertyReport(tol)
    for _ in range(trials):
        A = random_psd(rng, dim)
        B = A + random_psd(rng, dim, rank=int(rng.integers(1, dim + 1)))
        d = _power(B, p) - _power(A, p)
        rep.record("order_preserved", psd_defect((d + d.T) / 2.0), {"A": A.tolist(), "B": B.tolist()})
    return rep


# -- positive part operator on R^n -------------------------------------------


def positive_part_operator(A, x) -> np.ndarray:
    """``Phi(x) = A x^+``."""
    return np.asarray(A, dtype=float) @ np.maximum(np.asarray(x, dtype=float), 0.0)


def positive_part_subgradient(A, x0) -> np.ndarray:
    """Positive linear ``T = A diag(s)``, ``s_i = [x0_i > 0]``, tangent to ``x -> A x^+`` at ``x0``.

    ``s_i = 0`` is used at ``x0_i = 0``; any value in [0, 1] would do.
    """
    a = np.asarray(A, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if a.ndim != 2 or x0.shape != (a.shape[1],):
        raise StructuralError(f"matrix {a.shape} incompatible with point {x0.shape}")
    if np.any(a < 0):
        raise PreconditionError("A must be entrywise nonnegative")
    return a * (x0 > 0).astype(float)[None, :]


# -- JSON ---------------------------------------------------------------------


def matrix_to_dict(A) -> dict:
    a = np.asarray(A, dtype=float)
    return {"n": int(a.shape[0]), "rows": a.tolist()}


def matrix_from_dict(d: dict) -> np.ndarray:
    try:
        n, rows = int(d["n"]), d["rows"]
    except KeyError as exc:
        raise StructuralError(f"matrix file lacks field {exc}") from None
    a = np.asarray(rows, dtype=float)
    if a.shape != (n, n):
        raise StructuralError(f"'rows' has shape {a.shape}, expected ({n}, {n})")
    return as_symmetric(a)
