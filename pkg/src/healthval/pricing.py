"""Pricing of the basis instruments and the dual-route valuation report.

The basis instrument (t, s) pays the medical index level observed at s
at the later date t; its price under a scenario set is the exact
probability-weighted sum

    med[t, s] = sum_k w_k * i_med_k[s] / bn_k[t],      0 <= s <= t.

The boundary cases are ordinary bonds: med[t, 0] is the nominal ZCB
price and, with zero spread, med[t, t] the real ZCB price.  The medical
and cost indices are the modeled index times a deterministic per-year
spread factor, the smallest mechanism that lets benefit and cost
inflation differ without a second stochastic factor:

    i_med[t] = i[t] * (1 + med_spread)^t,   i_cost analogously.

Prices are always exact weighted sums over the finite set, never
subsampled; Monte-Carlo standard errors attach only to equal-weight
sampled sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .decomposition import CoefficientTriangle, aggregate, be_from_blocks
from .policy_engine import CapRule, PolicyData, simulate_portfolio
from .term_structures import ScenarioSet


@dataclass(frozen=True)
class InflationSpread:
    """Deterministic per-year multiplicative spreads on the modeled index."""

    med_spread: float = 0.0
    cost_spread: float = 0.0

    def __post_init__(self) -> None:
        if self.med_spread <= -1.0 or self.cost_spread <= -1.0:
            raise ValueError("spreads must exceed -1")

    def factors(self, horizon: int) -> tuple[np.ndarray, np.ndarray]:
        t = np.arange(horizon + 1)
        return (1.0 + self.med_spread) ** t, (1.0 + self.cost_spread) ** t


@dataclass(frozen=True, eq=False)
class BuildingBlockMatrix:
    """Prices of the delayed-index payouts plus the bond diagonals.

    ``med[t, s]`` = E[i_med[s]/bn[t]] for s <= t (zeros above the
    diagonal), ``cost_diag[t]`` = E[i_cost[t]/bn[t]], ``nominal_diag[t]``
    = E[1/bn[t]].  ``se_*`` are per-entry Monte-Carlo standard errors,
    present only for sampled sets.
    """

    horizon: int
    med: np.ndarray
    cost_diag: np.ndarray
    nominal_diag: np.ndarray
    se_med: Optional[np.ndarray] = None
    se_cost: Optional[np.ndarray] = None
    se_nominal: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        n = self.horizon + 1
        if self.med.shape != (n, n):
            raise ValueError(f"med must be ({n}, {n}), got {self.med.shape}")
        if len(self.cost_diag) != n or len(self.nominal_diag) != n:
            raise ValueError("diagonal vectors must have one entry per date")
        lower = self.med[np.tril_indices(n)]
        if np.any(lower <= 0.0) or not np.all(np.isfinite(lower)):
            raise ValueError("building-block prices must be positive and finite")
        if np.any(self.cost_diag <= 0.0) or np.any(self.nominal_diag <= 0.0):
            raise ValueError("building-block prices must be positive and finite")


def building_blocks(s: ScenarioSet, spread: Optional[InflationSpread] = None) -> BuildingBlockMatrix:
    """Exact block prices under a finite scenario set.

    One weighted reduction per (t, s) pair, evaluated as a single matrix
    product; standard errors are attached for sampled (equal-weight)
    sets.
    """
    if spread is None:
        spread = InflationSpread()
    horizon = s.horizon
    fmed, fcost = spread.factors(horizon)
    i_med = s.i * fmed[None, :]
    i_cost = s.i * fcost[None, :]
    inv_bn = 1.0 / s.bn
    disc = s.weights[:, None] * inv_bn

    med = np.tril(disc.T @ i_med)
    nominal_diag = disc.sum(axis=0)
    cost_diag = np.einsum("kt,kt->t", disc, i_cost)

    se_med = se_cost = se_nominal = None
    if s.sampled:
        n = s.n_paths
        sq = inv_bn**2 / n
        second_med = np.tril(sq.T @ i_med**2)
        se_med = np.sqrt(np.maximum(second_med - med**2, 0.0) / (n - 1))
        second_cost = np.einsum("kt,kt->t", sq, i_cost**2)
        se_cost = np.sqrt(np.maximum(second_cost - cost_diag**2, 0.0) / (n - 1))
        second_nom = sq.sum(axis=0)
        se_nominal = np.sqrt(np.maximum(second_nom - nominal_diag**2, 0.0) / (n - 1))

    return BuildingBlockMatrix(
        horizon=horizon,
        med=med,
        cost_diag=cost_diag,
        nominal_diag=nominal_diag,
        se_med=se_med,
        se_cost=se_cost,
        se_nominal=se_nominal,
    )


@dataclass(frozen=True, eq=False)
class ValuationReport:
    """Both valuation routes side by side, with the agreement verdict.

    ``per_t`` holds the decomposition route's Best-Estimate contribution
    of each date (they sum to ``be_decomposition``), which is where the
    interest-rate-sensitive periods show up.  ``standard_error`` is the
    Monte-Carlo error of the decomposition BE, propagated through the
    coefficients path by path; None for exact sets.
    """

    n_policies: int
    horizon: int
    be_decomposition: float
    be_oracle: float
    difference: float
    relative_difference: float
    tolerance: float
    routes_agree: bool
    per_t: np.ndarray
    standard_error: Optional[float]
    triangle: CoefficientTriangle
    blocks: BuildingBlockMatrix
    be_oracle_capped: Optional[float] = None
    cap_bound: Optional[bool] = None


def _be_standard_error(
    tri: CoefficientTriangle, s: ScenarioSet, spread: InflationSpread
) -> Optional[float]:
    """SE of the decomposition BE: per-path linear combination, then sample SE."""
    if not s.sampled or s.n_paths < 2:
        return None
    n = tri.horizon + 1
    fmed, fcost = spread.factors(s.horizon)
    i_med = s.i[:, :n] * fmed[None, :n]
    i_cost = s.i[:, :n] * fcost[None, :n]
    dated = i_med @ tri.dense().T + i_cost * tri.fixed[None, :]
    z = -np.sum(dated / s.bn[:, :n], axis=1)
    return float(np.std(z, ddof=1) / np.sqrt(s.n_paths))


def be_report(
    portfolio: Sequence[PolicyData],
    s: ScenarioSet,
    spread: Optional[InflationSpread] = None,
    tolerance: float = 1e-9,
    cap: Optional[CapRule] = None,
) -> ValuationReport:
    """Value a portfolio by both routes and compare them.

    Route disagreement beyond the tolerance is reported as a failure
    (``routes_agree`` False), never averaged away.  When a cap rule is
    given, the capped brute-force value is attached as a supplement; the
    decomposition itself is always uncapped (caps break linearity) and
    bounds the capped value from below.
    """
    if spread is None:
        spread = InflationSpread()
    tri = aggregate(portfolio)
    blocks = building_blocks(s, spread)
    be_dec = be_from_blocks(tri, blocks)
    sim = simulate_portfolio(portfolio, s, spread, cap=None)
    difference = be_dec - sim.be
    relative = abs(difference) / (1.0 + abs(sim.be))

    n = tri.horizon + 1
    per_t = -(
        np.sum(tri.dense() * blocks.med[:n, :n], axis=1) + tri.fixed * blocks.cost_diag[:n]
    )

    be_capped = None
    bound = None
    if cap is not None:
        capped = simulate_portfolio(portfolio, s, spread, cap=cap)
        be_capped = capped.be
        bound = capped.cap_bound

    return ValuationReport(
        n_policies=len(portfolio),
        horizon=tri.horizon,
        be_decomposition=be_dec,
        be_oracle=sim.be,
        difference=difference,
        relative_difference=relative,
        tolerance=tolerance,
        routes_agree=relative <= tolerance,
        per_t=per_t,
        standard_error=_be_standard_error(tri, s, spread),
        triangle=tri,
        blocks=blocks,
        be_oracle_capped=be_capped,
        cap_bound=bound,
    )
