"""Shared generators and paths for the test suite."""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from healthval import FirstOrderBasis, PolicyData, ScenarioSet, SecondOrderBasis

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    assert FIXTURES.is_dir(), "run scripts/make_fixtures.py first"
    return FIXTURES


def random_curve(rng: np.random.Generator, horizon: int):
    """Strictly positive ZCB curve pair with mild random year-over-year moves."""
    from healthval import CurvePair

    steps_n = rng.uniform(0.92, 1.04, horizon)
    steps_r = rng.uniform(0.95, 1.03, horizon)
    pn = np.concatenate([[1.0], np.cumprod(steps_n)])
    pr = np.concatenate([[1.0], np.cumprod(steps_r)])
    return CurvePair(pn=pn, pr=pr)


def random_scenario_set(rng: np.random.Generator, horizon: int, n_paths: int) -> ScenarioSet:
    """Arbitrary weighted positive paths; not calibrated to any curve."""
    bn = np.exp(np.cumsum(rng.normal(0.01, 0.08, (n_paths, horizon)), axis=1))
    br = np.exp(np.cumsum(rng.normal(0.005, 0.05, (n_paths, horizon)), axis=1))
    bn = np.hstack([np.ones((n_paths, 1)), bn])
    br = np.hstack([np.ones((n_paths, 1)), br])
    weights = rng.uniform(0.2, 1.0, n_paths)
    return ScenarioSet(bn=bn, br=br, weights=weights / weights.sum())


def random_basis_pair(rng: np.random.Generator, omega: int, q_max: float = 0.5):
    q1 = rng.uniform(0.05, q_max, omega + 1)
    q1[-1] = 1.0
    fo = FirstOrderBasis(
        k1=rng.uniform(0.0, 100.0, omega + 1),
        q1=q1,
        r_calc=float(rng.uniform(-0.005, 0.04)),
        c1=float(rng.uniform(0.0, 10.0)),
        margin=float(rng.uniform(0.0, 0.3)),
    )
    q2 = np.minimum(q1 * rng.uniform(0.7, 1.3, omega + 1), 1.0)
    q2[-1] = 1.0
    so = SecondOrderBasis(
        k2=rng.uniform(0.0, 100.0, omega + 1),
        q2=q2,
        c2=float(rng.uniform(0.0, 10.0)),
    )
    return fo, so


def random_policy(
    rng: np.random.Generator,
    max_run_off: int,
    policy_id: str = "",
    seasoned: bool = True,
) -> PolicyData:
    run_off = int(rng.integers(1, max_run_off + 1))
    omega = run_off + int(rng.integers(0, 4))
    fo, so = random_basis_pair(rng, omega)
    x0 = omega - run_off
    rs0 = float(rng.uniform(0.0, 50.0)) if seasoned else 0.0
    return PolicyData(x0=x0, fo=fo, so=so, rs0=rs0, id=policy_id or f"rand-{run_off}")


def random_inflation_path(rng: np.random.Generator, horizon: int) -> np.ndarray:
    path = np.concatenate([[1.0], np.cumprod(rng.uniform(0.9, 1.12, horizon))])
    return path
