"""Current market term structures and joint nominal/real scenario paths.

Conventions used throughout the engine:

- Time is discrete and annual, t = 0..T.  No interpolation, no day counts:
  inputs must supply every integer maturity.
- Curves are zero-coupon bond *prices* (discount factors), not rates.
  ``pn[t]`` is the nominal price today of one nominal unit at t, ``pr[t]``
  the real analogue.  Negative rates are allowed; prices only need to be
  strictly positive, with ``pn[0] == pr[0] == 1`` exactly.
- A scenario path carries the two money-market accounts ``bn`` and ``br``
  (value at t of rolling one unit at the one-year forward rates).  The
  inflation index is their ratio, ``i[t] = bn[t] / br[t]``, i.e. the
  exchange rate between the nominal and the real "currency".

All types are immutable after construction and all operations are pure,
so everything here can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _readonly(values, name: str) -> np.ndarray:
    """Copy to a read-only 1d float64 array, rejecting non-finite entries."""
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _readonly_2d(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CurvePair:
    """Current nominal and real ZCB price term structures out to horizon T.

    ``pn[t]`` and ``pr[t]`` for t = 0..T; both start at exactly 1 and stay
    strictly positive.  No monotonicity is required (negative rates are
    fine).
    """

    pn: np.ndarray
    pr: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "pn", _readonly(self.pn, "pn"))
        object.__setattr__(self, "pr", _readonly(self.pr, "pr"))
        if len(self.pn) != len(self.pr):
            raise ValueError(
                f"curve length mismatch: pn has {len(self.pn)} points, pr has {len(self.pr)}"
            )
        if len(self.pn) < 2:
            raise ValueError("curve needs at least maturities t = 0 and t = 1")
        if self.pn[0] != 1.0 or self.pr[0] != 1.0:
            raise ValueError("pn[0] and pr[0] must equal 1 exactly")
        if np.any(self.pn <= 0.0) or np.any(self.pr <= 0.0):
            raise ValueError("ZCB prices must be strictly positive")

    @property
    def horizon(self) -> int:
        return len(self.pn) - 1


@dataclass(frozen=True, eq=False)
class ScenarioPath:
    """One joint path of the nominal/real money-market accounts.

    ``i`` is derived on construction as the exchange rate bn/br; it starts
    at 1 because both accounts start at 1.
    """

    bn: np.ndarray
    br: np.ndarray
    i: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bn", _readonly(self.bn, "bn"))
        object.__setattr__(self, "br", _readonly(self.br, "br"))
        if len(self.bn) != len(self.br):
            raise ValueError("bn and br must share the same horizon")
        if self.bn[0] != 1.0 or self.br[0] != 1.0:
            raise ValueError("money-market accounts must start at 1")
        if np.any(self.bn <= 0.0) or np.any(self.br <= 0.0):
            raise ValueError("money-market accounts must be strictly positive")
        object.__setattr__(self, "i", _readonly(self.bn / self.br, "i"))

    @property
    def horizon(self) -> int:
        return len(self.bn) - 1


def inflation_index(path: ScenarioPath) -> np.ndarray:
    """Inflation index along a path: i[t] = bn[t] / br[t], with i[0] = 1."""
    return path.bn / path.br


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    """Finite weighted set of joint scenario paths.

    Stored stacked ((n_paths, T+1) arrays) so pricing can run as matrix
    arithmetic; individual :class:`ScenarioPath` views are available via
    :attr:`paths`.  Weights are strictly positive and sum to 1 within
    1e-12.  ``sampled`` marks equal-weight Monte-Carlo output, for which
    standard errors are meaningful.
    """

    bn: np.ndarray
    br: np.ndarray
    weights: np.ndarray
    sampled: bool = False
    i: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bn", _readonly_2d(self.bn, "bn"))
        object.__setattr__(self, "br", _readonly_2d(self.br, "br"))
        object.__setattr__(self, "weights", _readonly(self.weights, "weights"))
        if self.bn.shape != self.br.shape:
            raise ValueError("bn and br must have identical shapes")
        if self.bn.shape[0] != len(self.weights):
            raise ValueError("one weight per path required")
        if self.bn.shape[0] < 1:
            raise ValueError("scenario set must contain at least one path")
        if np.any(self.weights <= 0.0):
            raise ValueError("weights must be strictly positive")
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {self.weights.sum()!r}")
        if np.any(self.bn <= 0.0) or np.any(self.br <= 0.0):
            raise ValueError("money-market accounts must be strictly positive")
        if np.any(self.bn[:, 0] != 1.0) or np.any(self.br[:, 0] != 1.0):
            raise ValueError("every path must start with bn[0] = br[0] = 1")
        object.__setattr__(self, "i", _readonly_2d(self.bn / self.br, "i"))

    @classmethod
    def from_paths(
        cls, paths: list[ScenarioPath], weights, sampled: bool = False
    ) -> "ScenarioSet":
        if not paths:
            raise ValueError("scenario set must contain at least one path")
        horizons = {p.horizon for p in paths}
        if len(horizons) != 1:
            raise ValueError(f"all paths must share one horizon, got {sorted(horizons)}")
        bn = np.stack([p.bn for p in paths])
        br = np.stack([p.br for p in paths])
        return cls(bn=bn, br=br, weights=np.asarray(weights, dtype=float), sampled=sampled)

    @property
    def n_paths(self) -> int:
        return self.bn.shape[0]

    @property
    def horizon(self) -> int:
        return self.bn.shape[1] - 1

    @property
    def paths(self) -> tuple[ScenarioPath, ...]:
        return tuple(ScenarioPath(bn=self.bn[k], br=self.br[k]) for k in range(self.n_paths))

    def path(self, k: int) -> ScenarioPath:
        return ScenarioPath(bn=self.bn[k], br=self.br[k])


def implied_forwards(curve: CurvePair) -> tuple[np.ndarray, np.ndarray]:
    """One-year forward rates implied by the curve pair.

    F[t] = p[t]/p[t+1] - 1 for t = 0..T-1 (annual compounding), so that
    rolling an account at these forwards reproduces 1/p[t].
    """
    fn = curve.pn[:-1] / curve.pn[1:] - 1.0
    fr = curve.pr[:-1] / curve.pr[1:] - 1.0
    return fn, fr


def accounts_from_forwards(forwards: np.ndarray) -> np.ndarray:
    """Money-market account from one-year forwards: B[t] = prod(1 + F[s], s < t)."""
    forwards = np.asarray(forwards, dtype=float)
    account = np.empty(len(forwards) + 1)
    account[0] = 1.0
    np.cumprod(1.0 + forwards, out=account[1:])
    return account
