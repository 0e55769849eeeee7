"""Least-squares mapping of an additive chain onto a step-wise chain.

The step-wise parameters (mu, nu) minimize the mean squared difference of
the two conditional probabilities, averaged over the stationary law of the
additive chain::

    Dist = sum_a E[(P_sw(a | k) - P_ad(a | history))^2]
         = 2 h0^2 + 2 sum_{r,r'} h_r h_r' K(r - r')

    h0  = (abar - 1/2)(1 - 2 mu) + nu
    h_r = F(r) - 2 mu / N

Setting the gradient to zero gives mu = <K*F> / (2 <<K>>) and
nu = (1 - 2 abar)(1 - 2 mu) / 2.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .chain import AdditiveChainSpec, StepWiseChainSpec, require_valid
from .correlation import CorrelationSeq, correlation_from_memory, estimate_correlation, variance_of_k
from .entropy import source_entropy
from .generator import SymbolSequence
from .temperature import inv_temperature


@dataclass(frozen=True)
class Aggregates:
    avg_K: float
    double_avg_K: float
    K_star_F: float


def correlation_aggregates(K: CorrelationSeq, F, order: int) -> Aggregates:
    """<K> over lags 1..N; <<K>> and <K*F> over the N x N lag matrix (lags 0..N-1)."""
    if K.r_max < order:
        raise ValueError(f"need correlation lags up to {order}, have {K.r_max}")
    F = np.asarray(F, dtype=float)
    lags = K.lag_matrix(order)
    return Aggregates(
        avg_K=float(K.values[1:order + 1].sum() / order),
        double_avg_K=float(lags.sum() / order ** 2),
        K_star_F=float((lags @ F).sum() / order),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    mu: float
    nu: float
    dist: float
    avg_K: float
    double_avg_K: float
    K_star_F: float
    D_N: float
    inv_tau: float
    mu2: float
    mu_centred: float
    K_mode: str

    @property
    def mu_spread(self) -> float:
        forms = (self.mu, self.mu2, self.mu_centred)
        return max(forms) - min(forms)

    def stepwise(self, order: int) -> StepWiseChainSpec:
        return StepWiseChainSpec(order, self.mu, self.nu)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mu_alt_forms"] = {"mu2": d.pop("mu2"), "mu_centred": d.pop("mu_centred"),
                             "spread": self.mu_spread}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def dist_closed_form(add: AdditiveChainSpec, sw: StepWiseChainSpec, K: CorrelationSeq) -> float:
    n = add.order
    h0 = (add.mean - 0.5) * (1 - 2 * sw.mu) + sw.nu
    h = add.memory - 2 * sw.mu / n
    quad = float(h @ K.lag_matrix(n) @ h)
    return 2 * h0 ** 2 + 2 * quad


def map_to_stepwise(spec: AdditiveChainSpec, K: CorrelationSeq | None = None,
                    k_mode: str | None = None) -> EquivalenceReport:
    """Best step-wise approximation of ``spec``.

    With ``K=None`` the exact correlation function is used; an empirical K
    (e.g. from ``estimate_correlation``) may be supplied instead.
    """
    require_valid(spec)
    n = spec.order
    if K is None:
        K = correlation_from_memory(spec, n)
        k_mode = k_mode or "exact"
    else:
        k_mode = k_mode or "empirical"
    agg = correlation_aggregates(K, spec.memory, n)
    if agg.double_avg_K == 0:
        raise ValueError("<<K>> vanishes; correlation input is corrupt")
    mu = 0.5 * agg.K_star_F / agg.double_avg_K
    mu2 = 0.5 * agg.avg_K / agg.double_avg_K
    D_N = variance_of_k(K, n)
    mu_centred = n ** 2 / 2 * agg.avg_K / D_N
    nu = 0.5 * (1 - 2 * spec.mean) * (1 - 2 * mu)
    dist = dist_closed_form(spec, StepWiseChainSpec(n, mu, nu), K)
    return EquivalenceReport(
        mu=mu, nu=nu, dist=dist, avg_K=agg.avg_K, double_avg_K=agg.double_avg_K,
        K_star_F=agg.K_star_F, D_N=D_N, inv_tau=inv_temperature(n, mu),
        mu2=mu2, mu_centred=mu_centred, K_mode=k_mode,
    )


def map_empirical(spec: AdditiveChainSpec, seq: SymbolSequence) -> EquivalenceReport:
    return map_to_stepwise(spec, estimate_correlation(seq, spec.order), "empirical")


def _positions(add: AdditiveChainSpec, seq: SymbolSequence):
    """P_ad(1 | history_i) and k_i for every position with a full history."""
    a = np.asarray(seq.symbols if isinstance(seq, SymbolSequence) else seq, dtype=np.float64)
    n = add.order
    if len(a) < n + 1:
        raise ValueError(f"sequence needs at least N + 1 = {n + 1} symbols")
    # window ending at i-1: weight F(r) on a[i-r]
    conv = np.convolve(a - add.mean, np.concatenate([[0.0], add.memory]), mode="full")
    p_ad = add.mean + conv[n:len(a)]
    csum = np.concatenate([[0.0], np.cumsum(a)])
    k = csum[n:len(a)] - csum[0:len(a) - n]
    return p_ad, k


def dist_monte_carlo(add: AdditiveChainSpec, sw: StepWiseChainSpec, seq: SymbolSequence) -> float:
    """Sample average of sum_a (P_sw(a|k_i) - P_ad(a|history_i))^2 along ``seq``."""
    p_ad, k = _positions(add, seq)
    p_sw = (0.5 - sw.nu) + sw.mu * (2.0 * k / sw.order - 1.0)
    diff = p_sw - p_ad
    # the a = 0 term is the negated a = 1 term
    return float(np.mean(2 * diff ** 2))


@dataclass(frozen=True)
class DistMoments:
    """Sufficient statistics making Monte-Carlo Dist an explicit quadratic in (mu, nu).

    With ``x_i = 2k_i/N - 1`` and ``c_i = 1/2 - P_ad(1|history_i)`` the
    per-position difference is ``c_i - nu + mu x_i``.
    """

    cc: float
    c: float
    x: float
    xx: float
    cx: float
    count: int

    @classmethod
    def from_sequence(cls, add: AdditiveChainSpec, seq: SymbolSequence) -> "DistMoments":
        p_ad, k = _positions(add, seq)
        x = 2.0 * k / add.order - 1.0
        c = 0.5 - p_ad
        return cls(float(np.mean(c * c)), float(np.mean(c)), float(np.mean(x)),
                   float(np.mean(x * x)), float(np.mean(c * x)), len(c))

    def dist(self, mu, nu):
        mu = np.asarray(mu, dtype=float)
        nu = np.asarray(nu, dtype=float)
        sq = (self.cc + nu ** 2 + mu ** 2 * self.xx - 2 * nu * self.c
              + 2 * mu * self.cx - 2 * mu * nu * self.x)
        return 2 * sq

    def minimizer(self) -> tuple:
        """Empirical least-squares (mu, nu) for this sequence."""
        var_x = self.xx - self.x ** 2
        mu = -(self.cx - self.c * self.x) / var_x
        nu = self.c + mu * self.x
        return float(mu), float(nu)


MATCH_BRACKET_TOP = 0.5 - 1e-9


class EntropyMatchError(ValueError):
    pass


def match_entropy(add: AdditiveChainSpec, sw_order: int, tol: float = 1e-6) -> float:
    """mu' >= 0 such that the unbiased step-wise chain of order ``sw_order``
    has the same entropy rate as ``add``. Found by bisection."""
    if sw_order > add.order:
        raise ValueError("step-wise order must not exceed the additive order")
    target = source_entropy(add)

    def h(mu):
        return source_entropy(StepWiseChainSpec(sw_order, mu, 0.0))

    lo, hi = 0.0, MATCH_BRACKET_TOP
    h_lo, h_hi = h(lo), h(hi)
    if target > h_lo + tol:
        raise EntropyMatchError(f"target entropy {target:.6g} exceeds ln 2")
    if target < h_hi - tol:
        raise EntropyMatchError(f"target entropy {target:.6g} is below the mu -> 1/2 limit "
                                f"{h_hi:.6g} for order {sw_order}")
    probes = np.linspace(lo, hi, 8)
    values = [h(m) for m in probes]
    if np.any(np.diff(values) > tol):
        raise EntropyMatchError("step-wise entropy is not decreasing in mu on the bracket")
    if abs(h_lo - target) <= tol:
        return 0.0
    # entropy falls with mu: keep h(lo) >= target >= h(hi)
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if h(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
