"""Command-line surface for batch valuation runs.

Subcommands: ``value`` (both routes plus agreement check), ``simulate``
(brute-force only, the route that supports caps), ``compare`` (two
models side by side), ``premium-path`` (nominal vs real technical-rate
convention), ``demo-nonuniqueness`` (two-scenario parameter sweep) and
``calibrate-check``.

Every run is a pure function of (config file, input files, seed):
re-running writes byte-identical reports.  Exit codes: 0 success, 2
input error (with a machine-readable JSON record on stderr), 3 tolerance
or route-disagreement failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import reporting
from .decomposition import aggregate, be_from_blocks
from .esg import (
    TwoScenarioParams,
    calibration_check,
    delayed_inflation_factor,
    deterministic_model,
    two_scenario_model,
)
from .io_files import (
    ParseError,
    RunConfig,
    load_config,
    load_curve,
    load_portfolio,
    write_blocks,
    write_scenarios,
    write_triangle,
)
from .policy_engine import PolicyData, first_order_pv, project, project_real_rate, simulate_portfolio
from .pricing import be_report, building_blocks

#: Fixed two-scenario sweep: tilt ladders approaching the two price limits.
SWEEP_SPIKE = [(cn1, 1.0, 0.5) for cn1 in (0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005)]
SWEEP_CRASH = [
    (0.5, cr1, p1)
    for cr1, p1 in ((0.5, 0.6), (0.2, 0.8), (0.1, 0.9), (0.05, 0.95), (0.02, 0.98), (0.01, 0.985))
]


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_help()
        return 2
    try:
        return args.handler(args)
    except ParseError as exc:
        _emit_error("parse", str(exc), file=exc.path, line=exc.line, column=exc.column)
        return 2
    except (ValueError, OSError) as exc:
        _emit_error("input", str(exc))
        return 2


def _emit_error(kind: str, message: str, **context) -> None:
    record = {"error": {"kind": kind, "message": message, **context}}
    sys.stderr.write(reporting.dumps(record))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="healthval",
        description="Batch valuation of lifelong health insurance liabilities.",
    )
    sub = parser.add_subparsers(dest="command")

    def add(name: str, help_text: str, handler):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON run configuration")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument(
            "--model",
            choices=("deterministic", "two_scenario", "mc"),
            default=None,
            help="override the config model kind",
        )
        cmd.add_argument("--out", default=None, help="override the output directory")
        cmd.add_argument("--tolerance", type=float, default=None, help="override the tolerance")
        cmd.set_defaults(handler=handler)
        return cmd

    add("value", "value a portfolio by both routes and compare them", _cmd_value)
    sim = add("simulate", "brute-force valuation only (supports premium caps)", _cmd_simulate)
    sim.add_argument("--cap", action="store_true", help="apply the config's cap rule")
    add("compare", "price the building blocks under two models side by side", _cmd_compare)
    add("premium-path", "nominal vs real technical-rate premium trajectories", _cmd_premium_path)
    add("demo-nonuniqueness", "two-scenario sweep moving a block price 10x both ways", _cmd_demo)
    add("calibrate-check", "verify a model reprices the input curves", _cmd_calibrate)
    return parser


def _overrides(args) -> dict:
    out = {}
    if args.seed is not None:
        out["seed"] = args.seed
    if args.model is not None:
        out["model"] = args.model
    if args.out is not None:
        out["out_dir"] = args.out
    if args.tolerance is not None:
        out["tolerance"] = args.tolerance
    return out


def _load_inputs(config: RunConfig):
    curve = load_curve(config.curves)
    portfolio = load_portfolio(config.portfolio, config.tables_dir)
    return curve, portfolio


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_echo(config: RunConfig) -> dict:
    return {
        "curves": str(config.curves),
        "portfolio": str(config.portfolio),
        "tables_dir": str(config.tables_dir),
        "model": config.model.describe(),
        "model_b": config.model_b.describe() if config.model_b else None,
        "spread": {"med": config.spread.med_spread, "cost": config.spread.cost_spread},
        "cap": (
            {"abs_increase": config.cap.abs_increase, "inflation_multiple": config.cap.inflation_multiple}
            if config.cap
            else None
        ),
        "seed": config.seed,
        "tolerance": config.tolerance,
    }


def _cmd_value(args) -> int:
    config = load_config(args.config, **_overrides(args))
    curve, portfolio = _load_inputs(config)
    scenarios = config.model.build(curve, config.seed)
    report = be_report(
        portfolio, scenarios, config.spread, tolerance=config.tolerance, cap=config.cap
    )
    out = _out_dir(config)
    payload = {
        "command": "value",
        "config": _config_echo(config),
        "portfolio": {"n_policies": report.n_policies, "horizon": report.horizon},
        "scenarios": {
            "n_paths": scenarios.n_paths,
            "horizon": scenarios.horizon,
            "sampled": scenarios.sampled,
        },
        "best_estimate": {
            "decomposition": report.be_decomposition,
            "oracle": report.be_oracle,
            "difference": report.difference,
            "relative_difference": report.relative_difference,
            "tolerance": report.tolerance,
            "routes_agree": report.routes_agree,
            "standard_error": report.standard_error,
            "oracle_capped": report.be_oracle_capped,
            "cap_bound": report.cap_bound,
        },
        "per_t": report.per_t,
    }
    (out / "report.json").write_text(reporting.dumps(payload), encoding="utf-8")
    rows = [
        ["BE (decomposition)", report.be_decomposition],
        ["BE (brute force)", report.be_oracle],
        ["difference", report.difference],
        ["relative difference", report.relative_difference],
        ["routes agree", report.routes_agree],
    ]
    if report.standard_error is not None:
        rows.append(["Monte-Carlo SE", report.standard_error])
    if report.be_oracle_capped is not None:
        rows.append(["BE (capped, brute force)", report.be_oracle_capped])
        rows.append(["cap bound", report.cap_bound])
    (out / "report.txt").write_text(reporting.table(["quantity", "value"], rows), encoding="utf-8")
    (out / "contributions.svg").write_text(
        reporting.svg_bar_chart(report.per_t, "Best-Estimate contribution by date", "t", "BE"),
        encoding="utf-8",
    )
    write_triangle(out / "triangle_gross.csv", out / "triangle_fixed.csv", report.triangle)
    write_blocks(out / "blocks.csv", report.blocks)
    if not report.routes_agree:
        _emit_error(
            "route-disagreement",
            f"decomposition and brute-force Best Estimates differ by {report.relative_difference:.3e} "
            f"(tolerance {report.tolerance:.3e})",
        )
        return 3
    return 0


def _cmd_simulate(args) -> int:
    config = load_config(args.config, **_overrides(args))
    curve, portfolio = _load_inputs(config)
    scenarios = config.model.build(curve, config.seed)
    cap = config.cap if args.cap else None
    if args.cap and config.cap is None:
        raise ValueError("--cap requested but the config has no cap section")
    sim = simulate_portfolio(portfolio, scenarios, config.spread, cap=cap)
    out = _out_dir(config)
    payload = {
        "command": "simulate",
        "config": _config_echo(config),
        "cap_applied": bool(cap),
        "cap_bound": sim.cap_bound,
        "best_estimate": sim.be,
        "per_t": sim.per_t,
        "scenarios": {
            "n_paths": scenarios.n_paths,
            "horizon": scenarios.horizon,
            "sampled": scenarios.sampled,
        },
    }
    (out / "simulate.json").write_text(reporting.dumps(payload), encoding="utf-8")
    (out / "simulate.txt").write_text(
        reporting.table(
            ["quantity", "value"],
            [
                ["BE (brute force)", sim.be],
                ["cap applied", bool(cap)],
                ["cap bound", sim.cap_bound],
            ],
        ),
        encoding="utf-8",
    )
    (out / "simulate_contributions.svg").write_text(
        reporting.svg_bar_chart(sim.per_t, "Best-Estimate contribution by date", "t", "BE"),
        encoding="utf-8",
    )
    write_scenarios(out / "scenarios.csv", scenarios)
    return 0


def _sweep(curve) -> dict:
    """Two-scenario tilt sweep: block price vs the deterministic value."""
    det_value = float(building_blocks(deterministic_model(curve)).med[2, 1])
    entries = []
    for direction, grid in (("inflation-spike", SWEEP_SPIKE), ("deflation-degenerate", SWEEP_CRASH)):
        for cn1, cr1, p1 in grid:
            params = TwoScenarioParams(cn1=cn1, cr1=cr1, p1=p1)
            scen = two_scenario_model(curve, params)
            calib = calibration_check(scen, curve, tolerance=1e-12)
            priced = float(building_blocks(scen).med[2, 1])
            entries.append(
                {
                    "direction": direction,
                    "cn1": cn1,
                    "cr1": cr1,
                    "p1": p1,
                    "factor": delayed_inflation_factor(params),
                    "delayed_block_price": priced,
                    "ratio_vs_deterministic": priced / det_value,
                    "calibration_error": max(calib.max_error_nominal, calib.max_error_real),
                    "calibration_passed": calib.passed,
                }
            )
    ratios = [e["ratio_vs_deterministic"] for e in entries]
    return {
        "deterministic_value": det_value,
        "entries": entries,
        "exhibits_above_10x": max(ratios) > 10.0,
        "exhibits_below_0p1x": min(ratios) < 0.1,
        "all_calibrated": all(e["calibration_passed"] for e in entries),
    }


def _cmd_demo(args) -> int:
    config = load_config(args.config, **_overrides(args))
    curve = load_curve(config.curves)
    sweep = _sweep(curve)
    out = _out_dir(config)
    payload = {"command": "demo-nonuniqueness", "config": _config_echo(config), "sweep": sweep}
    (out / "nonuniqueness.json").write_text(reporting.dumps(payload), encoding="utf-8")
    rows = [
        [e["direction"], e["cn1"], e["cr1"], e["p1"], e["delayed_block_price"], e["ratio_vs_deterministic"]]
        for e in sweep["entries"]
    ]
    (out / "nonuniqueness.txt").write_text(
        reporting.table(["direction", "cn1", "cr1", "p1", "price", "ratio"], rows), encoding="utf-8"
    )
    ok = sweep["exhibits_above_10x"] and sweep["exhibits_below_0p1x"] and sweep["all_calibrated"]
    if not ok:
        _emit_error("sweep", "sweep failed to exhibit both price limits with exact calibration")
        return 3
    return 0


def _cmd_compare(args) -> int:
    config = load_config(args.config, **_overrides(args))
    if config.model_b is None:
        raise ValueError("compare needs a model_b section in the config")
    curve, portfolio = _load_inputs(config)

    tri = aggregate(portfolio)

    def side(model) -> dict:
        scen = model.build(curve, config.seed)
        blocks = building_blocks(scen, config.spread)
        return {
            "model": model.describe(),
            "be_decomposition": be_from_blocks(tri, blocks),
            "delayed_block_price_2_1": float(blocks.med[2, 1]) if blocks.horizon >= 2 else None,
            "nominal_diag": blocks.nominal_diag,
            "blocks": blocks,
        }

    side_a = side(config.model)
    side_b = side(config.model_b)
    blocks_a, blocks_b = side_a.pop("blocks"), side_b.pop("blocks")
    n = min(blocks_a.horizon, blocks_b.horizon) + 1
    block_delta = float(np.max(np.abs(blocks_a.med[:n, :n] - blocks_b.med[:n, :n])))
    ratio = None
    if side_a["delayed_block_price_2_1"] and side_b["delayed_block_price_2_1"]:
        ratio = side_b["delayed_block_price_2_1"] / side_a["delayed_block_price_2_1"]
    payload = {
        "command": "compare",
        "config": _config_echo(config),
        "model_a": side_a,
        "model_b": side_b,
        "be_delta": side_b["be_decomposition"] - side_a["be_decomposition"],
        "max_block_delta": block_delta,
        "delayed_block_ratio_2_1": ratio,
        "sweep": _sweep(curve),
    }
    out = _out_dir(config)
    (out / "compare.json").write_text(reporting.dumps(payload), encoding="utf-8")
    (out / "compare.txt").write_text(
        reporting.table(
            ["quantity", "model A", "model B"],
            [
                ["BE (decomposition)", side_a["be_decomposition"], side_b["be_decomposition"]],
                [
                    "delayed block (t=2,s=1)",
                    side_a["delayed_block_price_2_1"],
                    side_b["delayed_block_price_2_1"],
                ],
            ],
        ),
        encoding="utf-8",
    )
    write_blocks(out / "blocks_a.csv", blocks_a)
    write_blocks(out / "blocks_b.csv", blocks_b)
    # The portfolio triangle is model-independent: one export serves both
    # sides and is what portfolio diffs compare.
    write_triangle(out / "triangle_gross.csv", out / "triangle_fixed.csv", tri)
    return 0


def _cmd_premium_path(args) -> int:
    config = load_config(args.config, **_overrides(args))
    if config.premium_path is None:
        raise ValueError("premium-path needs a premium_path section in the config")
    _, portfolio = _load_inputs(config)
    pp = config.premium_path
    matches = [p for p in portfolio if p.id == pp.policy_id]
    if not matches:
        raise ValueError(f"policy id {pp.policy_id!r} not found in the portfolio")
    policy = matches[0]

    nominal = PolicyData(
        x0=policy.x0, fo=replace(policy.fo, r_calc=pp.r_nominal), so=policy.so, rs0=policy.rs0, id=policy.id
    )
    real = PolicyData(
        x0=policy.x0, fo=replace(policy.fo, r_calc=pp.r_real), so=policy.so, rs0=policy.rs0, id=policy.id
    )
    horizon = nominal.run_off
    index = pp.inflation_factor ** np.arange(horizon + 1)
    index[0] = 1.0
    res_nominal = project(nominal, index, index)
    res_real = project_real_rate(real, index)
    pv_nominal = first_order_pv(nominal.fo, nominal.x0, res_nominal.premiums_net, pp.r_nominal)
    pv_real = first_order_pv(nominal.fo, nominal.x0, res_real.premiums_net, pp.r_nominal)
    rel_gap = abs(pv_nominal - pv_real) / max(abs(pv_nominal), 1e-300)
    initial_gap = abs(res_real.premiums_net[0] / res_nominal.premiums_net[0] - 1.0)

    out = _out_dir(config)
    payload = {
        "command": "premium-path",
        "config": _config_echo(config),
        "policy_id": policy.id,
        "r_nominal": pp.r_nominal,
        "r_real": pp.r_real,
        "inflation_factor": pp.inflation_factor,
        "premiums_nominal_convention": res_nominal.premiums_net,
        "premiums_real_convention": res_real.premiums_net,
        "present_value_nominal_convention": pv_nominal,
        "present_value_real_convention": pv_real,
        "present_value_relative_gap": rel_gap,
        "initial_premium_relative_gap": initial_gap,
        "tolerance": config.tolerance,
    }
    (out / "premium_path.json").write_text(reporting.dumps(payload), encoding="utf-8")
    (out / "premium_path.svg").write_text(
        reporting.svg_line_chart(
            {
                f"nominal rate {pp.r_nominal:.4g}": res_nominal.premiums_net,
                f"real rate {pp.r_real:.4g}": res_real.premiums_net,
            },
            f"Net premium development, policy {policy.id}",
        ),
        encoding="utf-8",
    )
    (out / "premium_path.txt").write_text(
        reporting.table(
            ["quantity", "value"],
            [
                ["PV nominal convention", pv_nominal],
                ["PV real convention", pv_real],
                ["PV relative gap", rel_gap],
                ["initial premium gap", initial_gap],
            ],
        ),
        encoding="utf-8",
    )
    if rel_gap > config.tolerance:
        _emit_error(
            "tolerance",
            f"premium-path present values differ by {rel_gap:.3e} (tolerance {config.tolerance:.3e})",
        )
        return 3
    return 0


def _cmd_calibrate(args) -> int:
    config = load_config(args.config, **_overrides(args))
    curve = load_curve(config.curves)
    scenarios = config.model.build(curve, config.seed)
    report = calibration_check(scenarios, curve, tolerance=config.tolerance)
    out = _out_dir(config)
    payload = {
        "command": "calibrate-check",
        "config": _config_echo(config),
        "max_error_nominal": report.max_error_nominal,
        "max_error_real": report.max_error_real,
        "tolerance": report.tolerance,
        "passed": report.passed,
    }
    (out / "calibration.json").write_text(reporting.dumps(payload), encoding="utf-8")
    if not report.passed:
        _emit_error(
            "tolerance",
            f"calibration errors ({report.max_error_nominal:.3e}, {report.max_error_real:.3e}) "
            f"exceed tolerance {report.tolerance:.3e}",
        )
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
