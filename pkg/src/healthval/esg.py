"""Arbitrage-free scenario set constructors and the calibration check.

Every constructor returns a :class:`~healthval.term_structures.ScenarioSet`
whose weighted paths reprice the input curves exactly:

    sum_k w_k / bn_k[t] == pn[t]   and   sum_k w_k / br_k[t] == pr[t]

for every t.  Three models are provided:

- ``deterministic_model``: the single scenario forced by the curves.
- ``two_scenario_model``: two paths that tilt the year-1 accounts by
  c1/c2 on the nominal side and the whole real account by the same kind
  of tilt; the parameter relations make repricing exact by construction.
  Holding the curves fixed and varying the tilts moves the price of a
  delayed inflation payout E[i[1]/bn[2]] anywhere in (0, inf), which is
  the whole point of the two-scenario family.
- ``mc_model``: correlated lognormal account increments around the
  forward drift, then an exact per-time-slice renormalization so the
  empirical means of 1/bn[t] and 1/br[t] match the curves to machine
  precision.  Deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .term_structures import CurvePair, ScenarioSet, implied_forwards


@dataclass(frozen=True)
class TwoScenarioParams:
    """Tilts and weight of the first scenario in the two-scenario model.

    The complementary tilts cn2, cr2 follow from repricing; positivity of
    those requires p1 < min(1, 1/cn1, 1/cr1), enforced at construction.
    """

    cn1: float
    cr1: float
    p1: float

    def __post_init__(self) -> None:
        if not (self.cn1 > 0.0 and np.isfinite(self.cn1)):
            raise ValueError(f"cn1 must be a positive real, got {self.cn1!r}")
        if not (self.cr1 > 0.0 and np.isfinite(self.cr1)):
            raise ValueError(f"cr1 must be a positive real, got {self.cr1!r}")
        if not (0.0 < self.p1 < 1.0):
            raise ValueError(f"p1 must lie in (0, 1), got {self.p1!r}")
        if self.cn1 * self.p1 >= 1.0:
            raise ValueError(
                f"p1={self.p1} violates p1 < 1/cn1={1.0 / self.cn1}: "
                "second-scenario nominal tilt would not be positive"
            )
        if self.cr1 * self.p1 >= 1.0:
            raise ValueError(
                f"p1={self.p1} violates p1 < 1/cr1={1.0 / self.cr1}: "
                "second-scenario real tilt would not be positive"
            )

    @property
    def cn2(self) -> float:
        return (1.0 - self.cn1 * self.p1) / (1.0 - self.p1)

    @property
    def cr2(self) -> float:
        return (1.0 - self.cr1 * self.p1) / (1.0 - self.p1)


@dataclass(frozen=True)
class McModelParams:
    """Lognormal scenario sampler configuration.

    vol_n / vol_r are per-year log volatilities of the account increments,
    corr the correlation of the nominal and real shocks.  Output is fully
    determined by the seed.
    """

    n_paths: int
    vol_n: float
    vol_r: float
    corr: float
    seed: int

    def __post_init__(self) -> None:
        if self.n_paths < 2:
            raise ValueError(f"n_paths must be >= 2, got {self.n_paths}")
        if self.vol_n < 0.0 or self.vol_r < 0.0:
            raise ValueError("volatilities must be nonnegative")
        if not -1.0 <= self.corr <= 1.0:
            raise ValueError(f"corr must lie in [-1, 1], got {self.corr}")


@dataclass(frozen=True)
class CalibrationReport:
    """Worst repricing errors of a scenario set against a curve pair."""

    max_error_nominal: float
    max_error_real: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.max_error_nominal, self.max_error_real) <= self.tolerance


def deterministic_model(curve: CurvePair) -> ScenarioSet:
    """The unique single-scenario model: bn[t] = 1/pn[t], br[t] = 1/pr[t]."""
    bn = (1.0 / curve.pn)[None, :]
    br = (1.0 / curve.pr)[None, :]
    return ScenarioSet(bn=bn, br=br, weights=np.array([1.0]))


def two_scenario_model(curve: CurvePair, params: TwoScenarioParams) -> ScenarioSet:
    """Two-path model tilting the year-1 nominal account and the real account.

    Path i has bn[1] = 1/(cn_i * pn[1]) and br[t] = 1/(cr_i * pr[t]) for
    t >= 1, while bn[t] = 1/pn[t] from t = 2 on (the paths continue along
    the implied deterministic forward structure beyond the second year).
    Repricing holds exactly for all t by the tilt relations.
    """
    if curve.horizon < 2:
        raise ValueError("two-scenario model needs a curve with horizon T >= 2")
    tilts_n = (params.cn1, params.cn2)
    tilts_r = (params.cr1, params.cr2)
    bn = np.tile(1.0 / curve.pn, (2, 1))
    br = np.tile(1.0 / curve.pr, (2, 1))
    for k in range(2):
        bn[k, 1] = 1.0 / (tilts_n[k] * curve.pn[1])
        br[k, 1:] = 1.0 / (tilts_r[k] * curve.pr[1:])
    weights = np.array([params.p1, 1.0 - params.p1])
    return ScenarioSet(bn=bn, br=br, weights=weights)


def delayed_inflation_factor(params: TwoScenarioParams) -> float:
    """Closed-form ratio E[i[1]/bn[2]] / (deterministic value) for the model.

    Equals cr1/cn1 * p1 + (1 - cr1*p1)/(1 - cn1*p1) * (1 - p1); tends to
    +inf as cn1 -> 0 and to 0 as (cn1, cr1, p1) -> (1/2, 0, 1).
    """
    p1 = params.p1
    return params.cr1 / params.cn1 * p1 + (1.0 - params.cr1 * p1) / (1.0 - params.cn1 * p1) * (
        1.0 - p1
    )


def mc_model(curve: CurvePair, params: McModelParams) -> ScenarioSet:
    """Sampled lognormal scenario set, exactly moment-matched to the curves.

    Raw paths follow the forward drift with correlated Gaussian log
    shocks; each time slice of each account is then rescaled by one
    multiplicative factor so the weighted mean of the inverse account
    hits the curve price exactly.  Zero volatility reproduces the
    deterministic model on every path.
    """
    n, horizon = params.n_paths, curve.horizon
    rng = np.random.default_rng(np.uint64(params.seed))
    z_n = rng.standard_normal((n, horizon))
    z_ind = rng.standard_normal((n, horizon))
    z_r = params.corr * z_n + np.sqrt(1.0 - params.corr**2) * z_ind

    fn, fr = implied_forwards(curve)
    with np.errstate(over="ignore", invalid="ignore"):
        log_bn = np.cumsum(np.log1p(fn)[None, :] + params.vol_n * z_n, axis=1)
        log_br = np.cumsum(np.log1p(fr)[None, :] + params.vol_r * z_r, axis=1)
        bn = np.hstack([np.ones((n, 1)), np.exp(log_bn)])
        br = np.hstack([np.ones((n, 1)), np.exp(log_br)])

        # Exact per-slice moment matching: slice t is scaled so that
        # mean(1/b[:, t]) == p[t].  Slice 0 is pinned at 1 already.
        scale_n = np.mean(1.0 / bn, axis=0) / curve.pn
        scale_r = np.mean(1.0 / br, axis=0) / curve.pr
        scale_n[0] = 1.0
        scale_r[0] = 1.0
        bn *= scale_n[None, :]
        br *= scale_r[None, :]
    if not (np.all(np.isfinite(bn)) and np.all(np.isfinite(br))):
        raise ValueError("non-finite scenario draws; volatilities too large for the horizon")

    weights = np.full(n, 1.0 / n)
    return ScenarioSet(bn=bn, br=br, weights=weights, sampled=True)


def calibration_check(
    s: ScenarioSet, curve: CurvePair, tolerance: float = 1e-10
) -> CalibrationReport:
    """Worst absolute repricing error of the set against both curves.

    The default tolerance suits the exact constructors; a sampler without
    moment matching would need a statistical bound instead.
    """
    if s.horizon != curve.horizon:
        raise ValueError(
            f"horizon mismatch: scenario set has T={s.horizon}, curve has T={curve.horizon}"
        )
    priced_n = s.weights @ (1.0 / s.bn)
    priced_r = s.weights @ (1.0 / s.br)
    return CalibrationReport(
        max_error_nominal=float(np.max(np.abs(priced_n - curve.pn))),
        max_error_real=float(np.max(np.abs(priced_r - curve.pr))),
        tolerance=tolerance,
    )
