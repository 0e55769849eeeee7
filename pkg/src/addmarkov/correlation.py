"""Correlation functions of binary chains and their link to the memory function.

The memory function F and the correlation function K of an additive chain
satisfy ``K(r) = sum_{r'=1}^{N} F(r') K(r - r')`` for ``r >= 1`` with
``K(-r) = K(r)``. Given F (and K(0) = abar (1 - abar)) this is an N x N linear
system for K(1..N); given K it is a Yule-Walker-type system for F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import AdditiveChainSpec
from .generator import SymbolSequence

CONDITION_LIMIT = 1e12


class DegenerateSystemError(ValueError):
    """The linear system linking K and F is singular or ill-conditioned."""


@dataclass(frozen=True, eq=False)
class CorrelationSeq:
    """K(0..R); lookups at negative lags return K(|r|)."""

    abar: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def r_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, r):
        return self.values[abs(r)]

    def at(self, lags) -> np.ndarray:
        return self.values[np.abs(np.asarray(lags))]

    def lag_matrix(self, n: int) -> np.ndarray:
        """The n x n matrix K(r - r'), r, r' = 1..n."""
        self._need(n - 1)
        idx = np.arange(n)
        return self.values[np.abs(idx[:, None] - idx[None, :])]

    def _need(self, lag: int) -> None:
        if lag > self.r_max:
            raise ValueError(f"need correlation lags up to {lag}, have {self.r_max}")

    def to_csv(self) -> str:
        rows = ["r,K"] + [f"{r},{k:.17g}" for r, k in enumerate(self.values)]
        return "\n".join(rows) + "\n"


def estimate_correlation(seq: SymbolSequence, r_max: int) -> CorrelationSeq:
    """Plug-in estimate with the global sample mean in both factors."""
    a = np.asarray(seq.symbols if isinstance(seq, SymbolSequence) else seq, dtype=np.uint8)
    n = len(a)
    if n == 0:
        raise ValueError("empty sequence")
    if r_max < 0 or r_max >= n / 10:
        raise ValueError(f"r_max={r_max} must be below length/10 = {n / 10:g}")
    ones = a.astype(bool)
    mean = np.count_nonzero(ones) / n
    values = np.empty(r_max + 1)
    for r in range(r_max + 1):
        both = np.count_nonzero(ones[: n - r] & ones[r:])
        values[r] = both / (n - r) - mean * mean
    return CorrelationSeq(mean, values)


def _condition_1norm(matrix: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(matrix, 1))
    except np.linalg.LinAlgError:
        return np.inf


def correlation_from_memory(spec: AdditiveChainSpec, r_max: int | None = None) -> CorrelationSeq:
    """Exact K(0..r_max) of an additive chain."""
    n = spec.order
    F = spec.memory
    r_max = n if r_max is None else r_max
    k0 = spec.mean * (1 - spec.mean)

    # row r: K(r) - sum_{r' != r} F(r') K(|r - r'|) = F(r) K(0)
    system = np.eye(n)
    rhs = F * k0
    for r in range(1, n + 1):
        for rp in range(1, n + 1):
            d = abs(r - rp)
            if d:
                system[r - 1, d - 1] -= F[rp - 1]
    cond = _condition_1norm(system)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise DegenerateSystemError(f"memory function gives a degenerate system (cond={cond:.3g})")
    head = np.linalg.solve(system, rhs)

    values = np.empty(max(r_max, n) + 1)
    values[0] = k0
    values[1:n + 1] = head
    for r in range(n + 1, r_max + 1):
        values[r] = np.dot(F, values[r - 1:r - n - 1:-1])
    return CorrelationSeq(spec.mean, values[:r_max + 1])


def memory_from_correlation(K: CorrelationSeq, order: int) -> np.ndarray:
    """Solve sum_{r'} F(r') K(r - r') = K(r), r = 1..order, for F(1..order)."""
    if K.r_max < order:
        raise ValueError(f"need correlation lags up to {order}, have {K.r_max}")
    matrix = K.lag_matrix(order)
    cond = _condition_1norm(matrix)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise DegenerateSystemError(f"correlation matrix is degenerate (cond={cond:.3g})")
    return np.linalg.solve(matrix, K.values[1:order + 1])


def variance_of_k(K: CorrelationSeq, order: int) -> float:
    """Variance of the number of ones in an N-window: sum_{r,r'} K(r - r')."""
    K._need(order - 1)
    d = np.arange(1, order)
    return float(order * K.values[0] + 2 * np.sum((order - d) * K.values[d]))


@dataclass(frozen=True)
class VarianceAsymptotic:
    """Step-wise-chain asymptotics of D(N).

    ``value`` is None when the persistence parameter falls between the two
    regimes; both candidates are then carried.
    """

    n: float
    regime: str
    value: float | None
    weak: float
    strong: float | None


WEAK_THRESHOLD = 10.0
STRONG_THRESHOLD = 0.1


def dn_asymptotic(order: int, mu: float) -> VarianceAsymptotic:
    if abs(mu) >= 0.5:
        raise ValueError("mu must satisfy |mu| < 1/2")
    weak = order / (4 * (1 - 2 * mu))
    if mu <= 0:
        # persistence parameter undefined: only the weak-memory branch applies
        return VarianceAsymptotic(np.inf, "weak-only", weak, weak, None)
    n = order * (1 - 2 * mu) / (4 * mu)
    strong = order ** 2 / 4 - n * order * (order - 1) / 2
    if n >= WEAK_THRESHOLD:
        return VarianceAsymptotic(n, "weak", weak, weak, strong)
    if n <= STRONG_THRESHOLD:
        return VarianceAsymptotic(n, "strong", strong, weak, strong)
    return VarianceAsymptotic(n, "ambiguous", None, weak, strong)
