"""Market-consistent valuation of lifelong health insurance liabilities.

The Best Estimate of a portfolio is computed two independent ways: by
brute-force simulation of every policy along every economic scenario,
and by a static coefficient decomposition whose Monte-Carlo cost does
not grow with the portfolio.  Scenario models for the joint nominal/real
term structures (and hence the inflation index, their ratio) are
calibrated exactly to the current curve pair.
"""

from .term_structures import (
    CurvePair,
    ScenarioPath,
    ScenarioSet,
    accounts_from_forwards,
    implied_forwards,
    inflation_index,
)
from .esg import (
    CalibrationReport,
    McModelParams,
    TwoScenarioParams,
    calibration_check,
    delayed_inflation_factor,
    deterministic_model,
    mc_model,
    two_scenario_model,
)
from .policy_engine import (
    DEFAULT_TERMINAL_AGE,
    CapRule,
    FirstOrderBasis,
    PolicyData,
    PolicySchedule,
    ProjectionResult,
    SecondOrderBasis,
    SimulationResult,
    annuity_factor,
    benefit_pv,
    build_schedule,
    first_order_pv,
    oracle_be,
    project,
    project_real_rate,
    seasoned_rs0,
    simulate_portfolio,
)
from .decomposition import (
    CoefficientTriangle,
    aggregate,
    aggregate_triangles,
    be_from_blocks,
    gross_coefficients,
    net_coefficients,
)
from .pricing import (
    BuildingBlockMatrix,
    InflationSpread,
    ValuationReport,
    be_report,
    building_blocks,
)

__version__ = "0.1.0"

__all__ = [
    "CurvePair",
    "ScenarioPath",
    "ScenarioSet",
    "accounts_from_forwards",
    "implied_forwards",
    "inflation_index",
    "CalibrationReport",
    "McModelParams",
    "TwoScenarioParams",
    "calibration_check",
    "delayed_inflation_factor",
    "deterministic_model",
    "mc_model",
    "two_scenario_model",
    "DEFAULT_TERMINAL_AGE",
    "CapRule",
    "FirstOrderBasis",
    "PolicyData",
    "PolicySchedule",
    "ProjectionResult",
    "SecondOrderBasis",
    "SimulationResult",
    "annuity_factor",
    "benefit_pv",
    "build_schedule",
    "first_order_pv",
    "oracle_be",
    "project",
    "project_real_rate",
    "seasoned_rs0",
    "simulate_portfolio",
    "CoefficientTriangle",
    "aggregate",
    "aggregate_triangles",
    "be_from_blocks",
    "gross_coefficients",
    "net_coefficients",
    "BuildingBlockMatrix",
    "InflationSpread",
    "ValuationReport",
    "be_report",
    "building_blocks",
    "__version__",
]
