"""Static coefficient decomposition of health-insurance cash flows.

The projected cash flow of a policy at date t is linear in the index
levels seen so far:

    CF[t] = sum_{s<=t} coeffs[t, s] * i_med[s]  +  fixed[t] * i_cost[t]

with coefficients depending only on policy data.  Valuation therefore
splits into a per-policy coefficient computation (this module, O(T^2)
via the inductive recursion, never by symbolic expansion) and pricing of
the basis instruments E[i_med[s] / bn[t]] (module ``pricing``).  The sum
of the per-policy triangles values a whole portfolio, which makes the
Monte-Carlo cost independent of the number of policies.

Triangles are stored row-packed: row t holds its t+1 entries for
s = 0..t, so a triangle is one flat array of (T+1)(T+2)/2 floats and
portfolio aggregation is plain elementwise addition.

Caps on premium increases break the linearity; capped valuation must use
the brute-force route, for which the uncapped decomposition is a lower
bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .policy_engine import PolicyData, build_schedule
from .term_structures import _readonly

if TYPE_CHECKING:  # pragma: no cover - typing only
    from .pricing import BuildingBlockMatrix


def tri_size(horizon: int) -> int:
    """Number of packed entries of a lower triangle with rows 0..horizon."""
    return (horizon + 1) * (horizon + 2) // 2


def tri_offset(t: int) -> int:
    """Packed index of entry (t, 0)."""
    return t * (t + 1) // 2


@dataclass(frozen=True, eq=False)
class CoefficientTriangle:
    """Lower-triangular coefficients plus the fixed-cost vector.

    ``coeffs`` is row-packed (see module docstring); entry (t, s) is the
    amount of the index level i_med[s] paid at t, ``fixed[t]`` the amount
    of i_cost[t] paid at t.  The same layout houses the intermediate net
    and reserve triangles, whose fixed part is zero.
    """

    horizon: int
    coeffs: np.ndarray
    fixed: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _readonly(self.coeffs, "coeffs"))
        object.__setattr__(self, "fixed", _readonly(self.fixed, "fixed"))
        if len(self.coeffs) != tri_size(self.horizon):
            raise ValueError(
                f"packed length {len(self.coeffs)} does not match horizon {self.horizon}"
            )
        if len(self.fixed) != self.horizon + 1:
            raise ValueError("fixed-cost vector must have one entry per date")

    @classmethod
    def zeros(cls, horizon: int) -> "CoefficientTriangle":
        return cls(horizon, np.zeros(tri_size(horizon)), np.zeros(horizon + 1))

    def entry(self, t: int, s: int) -> float:
        if not 0 <= s <= t <= self.horizon:
            raise IndexError(f"entry ({t}, {s}) outside the triangle")
        return float(self.coeffs[tri_offset(t) + s])

    def row(self, t: int) -> np.ndarray:
        """Entries (t, 0..t) as a view into the packed array."""
        return self.coeffs[tri_offset(t) : tri_offset(t) + t + 1]

    def dense(self) -> np.ndarray:
        """(T+1, T+1) array with zeros above the diagonal."""
        out = np.zeros((self.horizon + 1, self.horizon + 1))
        for t in range(self.horizon + 1):
            out[t, : t + 1] = self.row(t)
        return out

    def padded(self, horizon: int) -> "CoefficientTriangle":
        """Extend with zero rows up to a larger horizon (no-op if equal)."""
        if horizon < self.horizon:
            raise ValueError("cannot pad to a smaller horizon")
        if horizon == self.horizon:
            return self
        coeffs = np.zeros(tri_size(horizon))
        coeffs[: len(self.coeffs)] = self.coeffs
        fixed = np.zeros(horizon + 1)
        fixed[: len(self.fixed)] = self.fixed
        return CoefficientTriangle(horizon, coeffs, fixed)


def net_coefficients(policy: PolicyData) -> tuple[CoefficientTriangle, CoefficientTriangle]:
    """Net-premium and reserve coefficient triangles of one policy.

    Row t of the net triangle reproduces the net premium:
    P[t] = sum_s net[t, s] * i_med[s]; the reserve triangle does the same
    for RS[t].  Built by the inductive recursion

        rs[t+1, s]  = g[t] * (rs[t, s] + net[t, s] - [s == t] * k1[t])
        net[t, s]   = [s == t] * A[t]/a[t]  -  rs[t, s]/a[t]

    with g[t] = (1+r)/(1-q1[t]).  A seasoned provision enters as the
    (0, 0) reserve entry, the coefficient of i_med[0] == 1.
    """
    sched = build_schedule(policy)
    horizon = sched.horizon
    net = np.zeros(tri_size(horizon))
    rs = np.zeros(tri_size(horizon))
    rs[0] = policy.rs0
    net[0] = (sched.benefit_value[0] - policy.rs0) / sched.annuity[0]
    for t in range(1, horizon + 1):
        prev, cur = tri_offset(t - 1), tri_offset(t)
        rs_row = rs[cur : cur + t]
        np.add(rs[prev : prev + t], net[prev : prev + t], out=rs_row)
        rs_row[t - 1] -= sched.k1[t - 1]
        rs_row *= sched.growth[t - 1]
        np.divide(rs_row, -sched.annuity[t], out=net[cur : cur + t])
        net[cur + t] = sched.benefit_value[t] / sched.annuity[t]
    zero_fixed = np.zeros(horizon + 1)
    return (
        CoefficientTriangle(horizon, net, zero_fixed),
        CoefficientTriangle(horizon, rs, zero_fixed.copy()),
    )


def gross_coefficients(policy: PolicyData) -> CoefficientTriangle:
    """Cash-flow coefficient triangle of one policy.

    Scales the net triangle by second-order survival and the margin
    loading, nets the second-order benefit off the diagonal, and carries
    the fixed-cost mismatch in the fixed vector:

        coeffs[t, s] = surv2[t] * net[t, s] / (1 - margin) - [s == t] * surv2[t] * k2[t]
        fixed[t]     = surv2[t] * (c1 / (1 - margin) - c2)
    """
    sched = build_schedule(policy)
    horizon = sched.horizon
    net_tri, _ = net_coefficients(policy)
    loading = 1.0 / (1.0 - policy.fo.margin)
    coeffs = np.empty(tri_size(horizon))
    for t in range(horizon + 1):
        off = tri_offset(t)
        row = coeffs[off : off + t + 1]
        np.multiply(net_tri.coeffs[off : off + t + 1], sched.surv2[t] * loading, out=row)
        row[t] -= sched.surv2[t] * sched.k2[t]
    fixed = sched.surv2 * (policy.fo.c1 * loading - policy.so.c2)
    return CoefficientTriangle(horizon, coeffs, fixed)


def aggregate_triangles(triangles: Iterable[CoefficientTriangle]) -> CoefficientTriangle:
    """Elementwise sum of triangles, padded to the largest horizon.

    Fixed-size chunks are accumulated in place and the chunk partials
    reduced pairwise, so the summation order is fixed regardless of how
    the caller batches policies.
    """
    triangles = list(triangles)
    if not triangles:
        return CoefficientTriangle.zeros(0)
    horizon = max(tri.horizon for tri in triangles)
    padded = [tri.padded(horizon) for tri in triangles]
    chunk = 256
    coeff_parts = []
    fixed_parts = []
    for start in range(0, len(padded), chunk):
        acc = np.zeros(tri_size(horizon))
        acc_fixed = np.zeros(horizon + 1)
        for tri in padded[start : start + chunk]:
            np.add(acc, tri.coeffs, out=acc)
            np.add(acc_fixed, tri.fixed, out=acc_fixed)
        coeff_parts.append(acc)
        fixed_parts.append(acc_fixed)
    return CoefficientTriangle(
        horizon,
        np.sum(np.stack(coeff_parts), axis=0),
        np.sum(np.stack(fixed_parts), axis=0),
    )


def aggregate(portfolio: Sequence[PolicyData]) -> CoefficientTriangle:
    """Portfolio coefficient triangle: sum of the per-policy gross triangles."""
    return aggregate_triangles(gross_coefficients(p) for p in portfolio)


def be_from_blocks(tri: CoefficientTriangle, blocks: "BuildingBlockMatrix") -> float:
    """Best Estimate from a coefficient triangle and building-block prices.

    BE = -sum_t ( sum_{s<=t} coeffs[t, s] * E[i_med[s]/bn[t]]
                  + fixed[t] * E[i_cost[t]/bn[t]] ).
    """
    if blocks.horizon < tri.horizon:
        raise ValueError(
            f"horizon shortfall: triangle needs {tri.horizon}, blocks cover {blocks.horizon}"
        )
    n = tri.horizon + 1
    total = float(np.sum(tri.dense() * blocks.med[:n, :n]))
    total += float(np.dot(tri.fixed, blocks.cost_diag[:n]))
    return -total
