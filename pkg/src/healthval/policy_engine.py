"""Policy data and the equivalence-principle projection machinery.

A policy carries two actuarial bases over integer ages x = 0..omega:

- first order (prudent, used to set premiums): annual benefits ``k1`` at
  today's price level, combined death/surrender probabilities ``q1`` with
  ``q1[omega] == 1``, technical rate ``r_calc``, fixed cost ``c1``,
  premium margin ``margin``;
- second order (best estimate, used to project the actual cash flow):
  ``k2``, ``q2``, ``c2``.

Premiums, benefits and costs all fall on integer dates t; the medical
index value observed at t applies to the adjustment taking effect at t.
The net premium at every date is set so that reserve plus annuity-value
of future premiums equals the index-adjusted benefit value, which pins
the whole premium path once the inflation path is known:

    P[t]  = (i_med[t] * A[x0+t] - RS[t]) / a[x0+t]
    RS[t+1] = (RS[t] + P[t] - i_med[t] * k1[x0+t]) * (1 + r) / (1 - q1[x0+t])

with a[x] the premium annuity factor and A[x] the benefit present value
under the first-order basis.  Gross premiums add the cost loading and
margin; the projected cash flow weighs the gross premium against
second-order benefits/costs and second-order survival.

Projection runs vectorized over many inflation paths at once, which is
what the brute-force portfolio valuation (`oracle_be`) builds on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .term_structures import ScenarioSet, _readonly

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from .pricing import InflationSpread

#: Terminal age used by the shipped table builders; q[omega] must be 1.
DEFAULT_TERMINAL_AGE = 121


@dataclass(frozen=True, eq=False)
class FirstOrderBasis:
    """Prudent pricing basis: benefits, terminations, rate, cost, margin."""

    k1: np.ndarray
    q1: np.ndarray
    r_calc: float
    c1: float = 0.0
    margin: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "k1", _readonly(self.k1, "k1"))
        object.__setattr__(self, "q1", _readonly(self.q1, "q1"))
        _validate_tables(self.k1, self.q1, "first-order")
        if not self.r_calc > -1.0:
            raise ValueError(f"technical rate must exceed -1, got {self.r_calc}")
        if self.c1 < 0.0:
            raise ValueError("annual fixed cost must be nonnegative")
        if not 0.0 <= self.margin < 1.0:
            raise ValueError(f"margin must lie in [0, 1), got {self.margin}")

    @property
    def terminal_age(self) -> int:
        return len(self.q1) - 1


@dataclass(frozen=True, eq=False)
class SecondOrderBasis:
    """Best-estimate basis used to project the actual cash flow."""

    k2: np.ndarray
    q2: np.ndarray
    c2: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "k2", _readonly(self.k2, "k2"))
        object.__setattr__(self, "q2", _readonly(self.q2, "q2"))
        _validate_tables(self.k2, self.q2, "second-order")
        if self.c2 < 0.0:
            raise ValueError("annual fixed cost must be nonnegative")

    @property
    def terminal_age(self) -> int:
        return len(self.q2) - 1


def _validate_tables(k: np.ndarray, q: np.ndarray, label: str) -> None:
    if len(k) != len(q):
        raise ValueError(f"{label} benefit and termination tables must cover the same ages")
    if len(q) < 1:
        raise ValueError(f"{label} tables must not be empty")
    if np.any(k < 0.0):
        raise ValueError(f"{label} benefits must be nonnegative")
    if np.any(q < 0.0) or np.any(q > 1.0):
        raise ValueError(f"{label} termination probabilities must lie in [0, 1]")
    if q[-1] != 1.0:
        raise ValueError(f"{label} termination probability at the terminal age must be 1")


@dataclass(frozen=True, eq=False)
class PolicyData:
    """Contract state: entry age, both bases, seasoned provision, identifier.

    ``run_off`` is the projection horizon: the first t at which the
    first-order termination probability hits 1.  The second-order basis
    must terminate no later, otherwise cash flows would extend past dates
    for which a premium is defined (inconsistent tables).
    """

    x0: int
    fo: FirstOrderBasis
    so: SecondOrderBasis
    rs0: float = 0.0
    id: str = ""
    run_off: int = field(init=False)

    def __post_init__(self) -> None:
        if self.x0 < 0 or self.x0 > self.fo.terminal_age:
            raise ValueError(f"entry age {self.x0} outside first-order table")
        if self.x0 > self.so.terminal_age:
            raise ValueError(f"entry age {self.x0} outside second-order table")
        if not (np.isfinite(self.rs0) and self.rs0 >= 0.0):
            raise ValueError(f"initial provision must be finite and >= 0, got {self.rs0}")
        horizon = int(np.argmax(self.fo.q1[self.x0 :] == 1.0))
        if self.x0 + horizon > self.so.terminal_age:
            raise ValueError(
                f"policy {self.id!r}: second-order table ends at age {self.so.terminal_age}, "
                f"run-off needs age {self.x0 + horizon}"
            )
        so_horizon_slice = self.so.q2[self.x0 : self.x0 + horizon + 1]
        if not np.any(so_horizon_slice == 1.0):
            raise ValueError(
                f"policy {self.id!r}: second-order survival outlives the first-order "
                "run-off; premiums are undefined past it (inconsistent q tables)"
            )
        object.__setattr__(self, "run_off", horizon)


@dataclass(frozen=True)
class CapRule:
    """Premium-increase limitation rule.

    The applied gross premium is a pure function of (previous applied
    gross, proposed gross, cost-index step): the annual increase factor
    is capped at max(1 + abs_increase, inflation_multiple * step).  Caps
    only bind on increases; each capped year the foregone net premium is
    compensated by a provision top-up, so the reserve path matches the
    uncapped one.
    """

    abs_increase: float = 0.05
    inflation_multiple: float = 2.0

    def __post_init__(self) -> None:
        if self.abs_increase < 0.0:
            raise ValueError("abs_increase must be nonnegative")
        if self.inflation_multiple < 0.0:
            raise ValueError("inflation_multiple must be nonnegative")

    def allowed_factor(self, cost_step) -> np.ndarray:
        return np.maximum(1.0 + self.abs_increase, self.inflation_multiple * np.asarray(cost_step))

    def apply(self, prev_gross, proposed_gross, cost_step) -> np.ndarray:
        """Applied gross premium; passes decreases and non-positive bases through."""
        prev_gross = np.asarray(prev_gross, dtype=float)
        proposed_gross = np.asarray(proposed_gross, dtype=float)
        ceiling = np.where(
            prev_gross > 0.0, prev_gross * self.allowed_factor(cost_step), np.inf
        )
        return np.minimum(proposed_gross, ceiling)


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Premiums, reserves and projected cash flow along one inflation path.

    Sign convention for ``cashflow``: insurer income positive (premiums),
    benefits and costs negative.  Under a cap the premium entries are the
    applied (capped) ones; ``reserves`` always follows the uncapped
    recursion because each cap year is compensated by a provision top-up.
    """

    premiums_net: np.ndarray
    premiums_gross: np.ndarray
    reserves: np.ndarray
    cashflow: np.ndarray
    negative_premium: bool = False
    cap_bound: bool = False

    def __post_init__(self) -> None:
        for name in ("premiums_net", "premiums_gross", "reserves", "cashflow"):
            object.__setattr__(self, name, _readonly(getattr(self, name), name))


@dataclass(frozen=True, eq=False)
class PolicySchedule:
    """Per-date arrays derived from a policy, for t = 0..run_off.

    annuity[t] and benefit_value[t] are the first-order annuity factor and
    benefit present value at age x0+t; growth[t] is the reserve roll-up
    factor (1+r)/(1-q1) for t < run_off; surv2[t] the second-order
    in-force probability at t.
    """

    policy: PolicyData
    annuity: np.ndarray
    benefit_value: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    growth: np.ndarray
    surv2: np.ndarray

    @property
    def horizon(self) -> int:
        return self.policy.run_off


def annuity_factor(fo: FirstOrderBasis, x: int) -> float:
    """Premium annuity: PV of an annual unit payment while in force.

    Sum over t of prod_{s<t} (1-q1[x+s])/(1+r); truncates where survival
    hits zero.  Always >= 1 (the payment at t = 0 is certain).
    """
    ann, _ = _value_tables(fo, x)
    return float(ann[0])


def benefit_pv(fo: FirstOrderBasis, x: int) -> float:
    """PV of first-order benefits at today's price level, same discounting."""
    _, apv = _value_tables(fo, x)
    return float(apv[0])


def _value_tables(fo: FirstOrderBasis, x: int) -> tuple[np.ndarray, np.ndarray]:
    """Annuity factors and benefit PVs for all ages x..omega, one backward pass."""
    if not 0 <= x <= fo.terminal_age:
        raise ValueError(f"age {x} outside the table (terminal age {fo.terminal_age})")
    omega = fo.terminal_age
    n = omega - x + 1
    ann = np.empty(n)
    apv = np.empty(n)
    ann[-1] = 1.0
    apv[-1] = fo.k1[omega]
    for j in range(n - 2, -1, -1):
        disc = (1.0 - fo.q1[x + j]) / (1.0 + fo.r_calc)
        ann[j] = 1.0 + disc * ann[j + 1]
        apv[j] = fo.k1[x + j] + disc * apv[j + 1]
    return ann, apv


def build_schedule(policy: PolicyData) -> PolicySchedule:
    """Precompute everything projection and decomposition need per date."""
    x0, horizon = policy.x0, policy.run_off
    ann, apv = _value_tables(policy.fo, x0)
    q1 = policy.fo.q1[x0 : x0 + horizon + 1]
    q2 = policy.so.q2[x0 : x0 + horizon + 1]
    surv2 = np.empty(horizon + 1)
    surv2[0] = 1.0
    np.cumprod(1.0 - q2[:-1], out=surv2[1:])
    return PolicySchedule(
        policy=policy,
        annuity=ann[: horizon + 1],
        benefit_value=apv[: horizon + 1],
        k1=policy.fo.k1[x0 : x0 + horizon + 1],
        k2=policy.so.k2[x0 : x0 + horizon + 1],
        growth=(1.0 + policy.fo.r_calc) / (1.0 - q1[:-1]) if horizon > 0 else np.empty(0),
        surv2=surv2,
    )


@dataclass(eq=False)
class _PathProjection:
    cashflow: np.ndarray
    premiums_net: Optional[np.ndarray]
    premiums_gross: Optional[np.ndarray]
    reserves: Optional[np.ndarray]
    negative_premium: bool
    cap_bound: bool


def _check_inflation(arr, horizon: int, name: str) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    if arr.shape[1] < horizon + 1:
        raise ValueError(f"{name} covers {arr.shape[1] - 1} years, run-off needs {horizon}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(arr <= 0.0):
        raise ValueError(f"{name} must be strictly positive (index levels)")
    if np.any(np.abs(arr[:, 0] - 1.0) > 1e-12):
        raise ValueError(f"{name}[0] must be 1 at the valuation date")
    return arr[:, : horizon + 1]


def _project_paths(
    schedule: PolicySchedule,
    i_med: np.ndarray,
    i_cost: np.ndarray,
    cap: Optional[CapRule],
    details: bool,
    real_rate: bool = False,
) -> _PathProjection:
    """Premium recursion vectorized over paths (rows of i_med / i_cost)."""
    policy = schedule.policy
    horizon = schedule.horizon
    n = i_med.shape[0]
    one_minus_margin = 1.0 - policy.fo.margin
    c1, c2 = policy.fo.c1, policy.so.c2

    cashflow = np.empty((n, horizon + 1))
    prem_net = np.empty((n, horizon + 1)) if details else None
    prem_gross = np.empty((n, horizon + 1)) if details else None
    reserves = np.empty((n, horizon + 1)) if details else None

    rs = np.full(n, policy.rs0)
    prev_applied = None
    negative = False
    bound = False
    for t in range(horizon + 1):
        im = i_med[:, t]
        ic = i_cost[:, t]
        proposed_net = (im * schedule.benefit_value[t] - rs) / schedule.annuity[t]
        proposed_gross = (proposed_net + ic * c1) / one_minus_margin
        if cap is not None and t > 0:
            step = ic / i_cost[:, t - 1]
            applied = cap.apply(prev_applied, proposed_gross, step)
            if schedule.surv2[t] > 0.0 and np.any(applied < proposed_gross):
                bound = True
        else:
            applied = proposed_gross
        cashflow[:, t] = (applied - im * schedule.k2[t] - ic * c2) * schedule.surv2[t]
        if details:
            prem_gross[:, t] = applied
            if cap is None:
                prem_net[:, t] = proposed_net
            else:
                prem_net[:, t] = applied * one_minus_margin - ic * c1
            reserves[:, t] = rs
        if np.any(proposed_net < 0.0):
            negative = True
        if t < horizon:
            # Proposed (uncapped) net premium feeds the reserve: the cap's
            # foregone amount is topped up from the insurer's funds.
            rs = (rs + proposed_net - im * schedule.k1[t]) * schedule.growth[t]
            if real_rate:
                rs = rs * (i_med[:, t + 1] / im)
        prev_applied = applied
    if not np.all(np.isfinite(cashflow)):
        raise ValueError(f"policy {policy.id!r}: projection produced non-finite values")
    return _PathProjection(cashflow, prem_net, prem_gross, reserves, negative, bound)


def project(
    policy: PolicyData,
    i_med,
    i_cost,
    cap: Optional[CapRule] = None,
) -> ProjectionResult:
    """Project premiums, reserves and cash flow along one inflation path.

    ``i_med`` and ``i_cost`` are index levels at t = 0..run_off (at
    least), both 1 at the valuation date.  With a cap, premium entries are
    the applied ones while reserves follow the uncapped recursion (the
    foregone net premium is added back each capped year).
    """
    schedule = build_schedule(policy)
    i_med = _check_inflation(i_med, schedule.horizon, "i_med")
    i_cost = _check_inflation(i_cost, schedule.horizon, "i_cost")
    out = _project_paths(schedule, i_med, i_cost, cap, details=True)
    return ProjectionResult(
        premiums_net=out.premiums_net[0],
        premiums_gross=out.premiums_gross[0],
        reserves=out.reserves[0],
        cashflow=out.cashflow[0],
        negative_premium=out.negative_premium,
        cap_bound=out.cap_bound,
    )


def project_real_rate(policy: PolicyData, i_med) -> ProjectionResult:
    """Projection with the technical rate treated as a real rate.

    The reserve roll-up gains a factor i_med[t+1]/i_med[t], which makes
    net premiums track the index exactly: P[t] = i_med[t] * P[0].  That
    identity is verified here and its failure raises (it signals a
    numerically hostile basis).  The cost index is taken equal to the
    medical index for the gross figures.
    """
    schedule = build_schedule(policy)
    i_med = _check_inflation(i_med, schedule.horizon, "i_med")
    out = _project_paths(schedule, i_med, i_med, cap=None, details=True, real_rate=True)
    p = out.premiums_net[0]
    scale = max(abs(p[0]), 1e-12)
    drift = np.max(np.abs(p - i_med[0] * p[0])) / scale
    if drift > 1e-11:
        raise ArithmeticError(
            f"policy {policy.id!r}: real-rate premium identity violated ({drift:.2e} relative)"
        )
    return ProjectionResult(
        premiums_net=p,
        premiums_gross=out.premiums_gross[0],
        reserves=out.reserves[0],
        cashflow=out.cashflow[0],
        negative_premium=out.negative_premium,
        cap_bound=False,
    )


def seasoned_rs0(current_premium: float, x_now: int, fo: FirstOrderBasis) -> float:
    """Back out the technical provision of a running policy from its premium.

    With benefits taken at today's price level (index rebased to 1 at the
    valuation date), the equivalence principle pins the provision:
    rs0 = A[x] - a[x] * premium.  Materially negative results mean the
    premium and tables cannot belong to the same contract.
    """
    ann, apv = _value_tables(fo, x_now)
    rs0 = float(apv[0] - ann[0] * current_premium)
    if rs0 < -1e-9 * apv[0]:
        raise ValueError(
            f"premium {current_premium} with this basis implies a negative provision "
            f"({rs0:.6g}); premium/table combination is inconsistent"
        )
    return max(rs0, 0.0)


def first_order_pv(fo: FirstOrderBasis, x0: int, values, rate: float) -> float:
    """PV of dated amounts under first-order survival and a flat annual rate."""
    values = np.asarray(values, dtype=float)
    surv = np.empty(len(values))
    surv[0] = 1.0
    np.cumprod(1.0 - fo.q1[x0 : x0 + len(values) - 1], out=surv[1:])
    disc = (1.0 + rate) ** -np.arange(len(values))
    return float(np.sum(values * surv * disc))


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Brute-force valuation output: Best Estimate plus per-date contributions."""

    be: float
    per_t: np.ndarray
    cap_bound: bool


def _index_factors(spread: "InflationSpread | None", horizon: int) -> tuple[np.ndarray, np.ndarray]:
    t = np.arange(horizon + 1)
    if spread is None:
        ones = np.ones(horizon + 1)
        return ones, ones.copy()
    return (1.0 + spread.med_spread) ** t, (1.0 + spread.cost_spread) ** t


def simulate_portfolio(
    portfolio: Sequence[PolicyData],
    s: ScenarioSet,
    spread: "InflationSpread | None" = None,
    cap: Optional[CapRule] = None,
) -> SimulationResult:
    """Value a portfolio by tracking every policy along every path.

    BE = -sum_k w_k sum_policies sum_t CF[t](path k) / bn_k[t].  This is
    the reference route the coefficient decomposition is tested against,
    and the only route that supports premium caps.
    """
    horizon = max((p.run_off for p in portfolio), default=0)
    for p in portfolio:
        if p.run_off > s.horizon:
            raise ValueError(
                f"policy {p.id!r} runs {p.run_off} years but scenarios stop at {s.horizon}"
            )
    per_t = np.zeros(horizon + 1)
    bound = False
    fmed, fcost = _index_factors(spread, s.horizon)
    for p in portfolio:
        cols = p.run_off + 1
        schedule = build_schedule(p)
        i_med = s.i[:, :cols] * fmed[:cols]
        i_cost = s.i[:, :cols] * fcost[:cols]
        out = _project_paths(schedule, i_med, i_cost, cap, details=False)
        disc = s.weights[:, None] / s.bn[:, :cols]
        per_t[:cols] -= np.sum(disc * out.cashflow, axis=0)
        bound = bound or out.cap_bound
    return SimulationResult(be=float(per_t.sum()), per_t=per_t, cap_bound=bound)


def oracle_be(
    portfolio: Sequence[PolicyData],
    s: ScenarioSet,
    spread: "InflationSpread | None" = None,
    cap: Optional[CapRule] = None,
) -> float:
    """Best Estimate by brute-force per-path simulation (see simulate_portfolio)."""
    return simulate_portfolio(portfolio, s, spread, cap).be
