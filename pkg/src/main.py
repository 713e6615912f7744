"""
Main Entry Point

Command-line front end for the fiscal stabiliser toolkit.

Subcommands:
    gap        output gap (Y - Yp)/Yp
    balance    aggregate structural/cyclical decomposition (flags or --csv)
    disagg     disaggregate structural balance (flags or --csv)
    sfa        automatic stabiliser contribution from balance changes
    comply     fiscal rule check (flags or --csv)
    classify   stabiliser class of a key=value descriptor
    vol        volatility function, derivatives and stationarity
    effect     effectiveness path, optimum search and optimality check
    simulate   analytic and numeric logistic base-of-action trajectory

Exit status: 0 on success, 1 on domain, numeric or ingestion errors,
2 on usage or configuration errors.
"""

import argparse
import json
import math
import sys
from collections.abc import Callable
from pathlib import Path

PROJECT_ROOT = Path(__file__).parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from pydantic import ValidationError  # noqa: E402

from src.analytics import (  # noqa: E402
    MIN_OPTIMUM_SAMPLES,
    DisaggregateInputs,
    Elasticities,
    FiscalObservation,
    LogisticSolution,
    RevenueCategory,
    StabiliserDescriptor,
    VolParams,
    automatic_type_conditions,
    base_logistic_analytic,
    base_logistic_numeric,
    class_profile,
    classify_stabiliser,
    classify_stationary,
    coupled_rate_samples,
    effectiveness_trajectory,
    equilibrium_residual,
    gradient_check,
    optimality_condition_check,
    optimum_search,
    output_gap,
    sampling_grid,
    sfa_from_deltas,
    stabilisers_required,
    vol_gradient_chain_rule,
    vol_gradient_printed_form,
    vol_value,
)
from src.data import (  # noqa: E402
    DISCREPANCY_NOTES,
    Report,
    ingest_csv,
    read_rate_samples,
    render,
    write_output,
    write_plot_data,
)
from src.utils import (  # noqa: E402
    ConfigError,
    FiscalError,
    RunConfig,
    get_logger,
    load_run_config,
    setup_logging,
)
from src.workflows import (  # noqa: E402
    BatchWorkflow,
    balance_values,
    compliance_values,
    disaggregate_values,
)

logger = get_logger("main")

Handler = Callable[[argparse.Namespace, RunConfig], Report]


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid number: '{text}'") from e
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"number must be finite, got '{text}'")
    return value


def _flag(report: Report, code: str) -> None:
    """Record a discrepancy note on the report and in the log."""
    report.warn(code)
    logger.warning(DISCREPANCY_NOTES[code])


def _require(args: argparse.Namespace, names: list[str]) -> None:
    """Flag-mode subcommands need every listed option when --csv is absent."""
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name) is None]
    if missing:
        args.parser.error(f"missing {', '.join(missing)} (or use --csv)")


def _observation(args: argparse.Namespace) -> FiscalObservation:
    _require(args, ["y", "yp", "revenue", "expenditure"])
    return FiscalObservation(
        period=args.year,
        y_current=args.y,
        y_potential=args.yp,
        revenue=args.revenue,
        expenditure=args.expenditure,
    )


def _elasticities(config: RunConfig) -> Elasticities:
    return Elasticities(epsilon_v=config.epsilon_v, epsilon_c=config.epsilon_c)


# =============================================================================
# Subcommand handlers
# =============================================================================


def handle_gap(args: argparse.Namespace, config: RunConfig) -> Report:
    obs = FiscalObservation(
        period=0, y_current=args.y, y_potential=args.yp, revenue=0.0, expenditure=0.0
    )
    return Report(
        subcommand="gap",
        inputs=[{"y_current": args.y, "y_potential": args.yp}],
        results=[{"value": output_gap(obs)}],
    )


def handle_balance(args: argparse.Namespace, config: RunConfig) -> Report:
    report = Report(subcommand="balance")

    if args.csv:
        batch = BatchWorkflow(config).run_balance(ingest_csv(args.csv))
        batch.raise_first_failure()
        report.inputs = [{"csv": str(args.csv)}]
        report.results = batch.rows()
    else:
        obs = _observation(args)
        report.inputs = [obs.model_dump()]
        report.results = [{"year": obs.period, **balance_values(obs, _elasticities(config))}]

    _flag(report, "cyclical_closed_form")
    return report


def handle_disagg(args: argparse.Namespace, config: RunConfig) -> Report:
    report = Report(subcommand="disagg")

    if args.csv:
        batch = BatchWorkflow(config).run_disaggregate(ingest_csv(args.csv))
        batch.raise_first_failure()
        report.inputs = [{"csv": str(args.csv)}]
        report.results = batch.rows()
        return report

    _require(args, ["revenues", "expenditure", "y", "yp", "u", "u_star"])
    inputs = DisaggregateInputs(
        revenues=tuple(
            RevenueCategory(amount=amount, elasticity=elasticity)
            for amount, elasticity in zip(args.revenues, args.revenue_elasticities, strict=True)
        ),
        expenditure=args.expenditure,
        expenditure_elasticity=args.eps_c_u,
        x_term=args.x_term,
        y_current=args.y,
        y_potential=args.yp,
        u_current=args.u,
        u_structural=args.u_star,
    )
    report.inputs = [inputs.model_dump()]
    report.results = [{"year": args.year, **disaggregate_values(inputs)}]
    return report


def handle_sfa(args: argparse.Namespace, config: RunConfig) -> Report:
    return Report(
        subcommand="sfa",
        inputs=[{"delta_sbc": args.delta_sbc, "delta_sbs": args.delta_sbs}],
        results=[{"value": sfa_from_deltas(args.delta_sbc, args.delta_sbs)}],
    )


def handle_comply(args: argparse.Namespace, config: RunConfig) -> Report:
    report = Report(subcommand="comply")

    if args.csv:
        batch = BatchWorkflow(config).run_compliance(ingest_csv(args.csv))
        batch.raise_first_failure()
        report.inputs = [{"csv": str(args.csv)}]
        report.results = batch.rows()
        return report

    _require(args, ["debt_ratio"])
    obs = _observation(args)
    report.inputs = [{**obs.model_dump(), "debt_ratio": args.debt_ratio}]
    report.results = [
        {
            "year": obs.period,
            **compliance_values(obs, _elasticities(config), args.debt_ratio, config),
        }
    ]
    return report


def handle_classify(args: argparse.Namespace, config: RunConfig) -> Report:
    descriptor = StabiliserDescriptor.from_pairs(args.pairs)
    cls = classify_stabiliser(descriptor)
    profile = class_profile(cls)
    profile.pop("class")

    return Report(
        subcommand="classify",
        inputs=[descriptor.model_dump(mode="json")],
        results=[{"value": cls.value, **profile}],
    )


def handle_vol(args: argparse.Namespace, config: RunConfig) -> Report:
    if args.n is not None or args.m is not None:
        _require(args, ["n", "m"])
        params = VolParams(k_rate=args.k, b_base=args.b, n_term=args.n, m_term=args.m)
    else:
        _require(args, ["va", "vp", "ca", "cp"])
        params = VolParams.from_components(args.k, args.b, args.va, args.vp, args.ca, args.cp)

    report = Report(subcommand="vol", inputs=[params.model_dump()])
    tol = config.stationarity_tolerance
    stationary = classify_stationary(params, tol)

    row: dict = {
        "vol": vol_value(params),
        "k_star": params.k_star,
        "b": params.b_root,
        "stabilisers_required": stabilisers_required(params),
        **stationary.to_dict(),
    }

    if stationary.degenerate:
        row["gradient_check_error"] = None
        row["gradient_check_ok"] = None
    else:
        error = gradient_check(params)
        row["gradient_check_error"] = error
        row["gradient_check_ok"] = error <= config.gradient_tolerance

    row.update(automatic_type_conditions(params, tol))
    if row["stationary_at_origin"]:
        _flag(report, "second_differential_origin")

    if args.y is not None or args.yp is not None:
        _require(args, ["y", "yp"])
        row["equilibrium_residual"] = equilibrium_residual(args.y, args.yp, params)

    if args.dvol_dt is not None:
        _require(args, ["dk_dt", "db_dt"])
        row["chain_rule_gradient"] = list(
            vol_gradient_chain_rule(params, args.dvol_dt, args.dk_dt, args.db_dt)
        )
        row["printed_form_gradient"] = list(vol_gradient_printed_form(params, args.dvol_dt))
        report.warn("gradient_chain_rule")

    report.results = [row]
    return report


def handle_simulate(args: argparse.Namespace, config: RunConfig) -> Report:
    tol = args.tol if args.tol is not None else config.ode_tolerance
    numeric = base_logistic_numeric(args.b0, args.t0, args.t1, args.step, tol=tol)
    analytic = base_logistic_analytic(LogisticSolution(t0=args.t0, x0=args.b0), numeric.times)

    report = Report(
        subcommand="simulate",
        inputs=[{"b0": args.b0, "t0": args.t0, "t1": args.t1, "step": args.step, "tol": tol}],
    )
    report.results = [
        {
            "t": float(t),
            "B_analytic": float(exact),
            "B_numeric": float(approx),
            "rel_error": abs(float(approx) - float(exact)) / max(abs(float(exact)), 1e-300),
        }
        for t, exact, approx in zip(numeric.times, analytic, numeric.values, strict=True)
    ]

    # The published closed form covers the decreasing branch above the target
    if args.b0 > 1:
        _flag(report, "logistic_coefficients")
    return report


def handle_effect(args: argparse.Namespace, config: RunConfig) -> Report:
    init = LogisticSolution(t0=args.t0, x0=args.b0)
    grid = sampling_grid(args.t0, args.t1, args.step)

    if args.k_file is not None:
        rate = read_rate_samples(args.k_file, grid)
        mode = {"k_file": str(args.k_file)}
    elif args.coupling is not None:
        c = args.coupling

        def rate(times, base):
            return coupled_rate_samples(c, base)

        mode = {"coupling": c}
    else:
        rate = args.k_const
        mode = {"k_const": args.k_const}

    report = Report(
        subcommand="effect",
        inputs=[{"b0": args.b0, "t0": args.t0, "t1": args.t1, "step": args.step, **mode}],
    )

    path = effectiveness_trajectory(rate, init, grid)
    rows = path.rows()

    summary: dict = {"c_const": init.c_const, "optimum_search": None}
    if len(grid) >= MIN_OPTIMUM_SAMPLES:
        summary["optimum_search"] = optimum_search(path).to_dict()
    else:
        logger.info(f"Grid has {len(grid)} samples; optimum search skipped")

    if len(grid) >= 3:
        check = optimality_condition_check(path.rate, init.c_const, grid)
        for row, extra in zip(rows, check.rows(), strict=True):
            row.update({key: value for key, value in extra.items() if key not in ("t", "K")})
        report.warn("second_derivative_expression")

    if args.plot_data is not None:
        write_plot_data(rows, args.plot_data)

    report.results = rows
    report.summary = summary
    return report


# =============================================================================
# Parser
# =============================================================================


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key=value file overriding settings")
    common.add_argument("--format", choices=["text", "json", "csv"], help="report format")
    common.add_argument("--out", type=Path, help="write the report to a file")
    common.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    )
    common.add_argument("--json-logs", action="store_true", help="JSON log records on stderr")
    return common


def _add_observation_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--year", type=int, default=0)
    sub.add_argument("--y", type=_finite_float, help="current GDP")
    sub.add_argument("--yp", type=_finite_float, help="potential GDP")
    sub.add_argument("--revenue", type=_finite_float, help="budget revenue V")
    sub.add_argument("--expenditure", type=_finite_float, help="budget expenditure C")
    sub.add_argument("--eps-v", type=_finite_float, help="revenue elasticity")
    sub.add_argument("--eps-c", type=_finite_float, help="expenditure elasticity")
    sub.add_argument("--csv", type=Path, help="observation table")


def build_parser() -> argparse.ArgumentParser:
    """Build the `fiscal-stab` argument parser."""
    parser = argparse.ArgumentParser(
        prog="fiscal-stab",
        description="Budget-balance decomposition and automatic fiscal stabiliser analysis.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    common = _common_options()

    def add(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(handler=handler, parser=sub)
        return sub

    sub = add("gap", handle_gap, "output gap (Y - Yp)/Yp")
    sub.add_argument("--y", type=_finite_float, required=True)
    sub.add_argument("--yp", type=_finite_float, required=True)

    sub = add("balance", handle_balance, "structural/cyclical decomposition")
    _add_observation_flags(sub)

    sub = add("disagg", handle_disagg, "disaggregate structural balance")
    sub.add_argument("--year", type=int, default=0)
    sub.add_argument("--revenues", type=_finite_float, nargs=4, metavar=("T1", "T2", "T3", "T4"))
    sub.add_argument(
        "--revenue-elasticities",
        type=_finite_float,
        nargs=4,
        default=[0.0, 0.0, 0.0, 0.0],
        metavar=("E1", "E2", "E3", "E4"),
    )
    sub.add_argument("--expenditure", type=_finite_float)
    sub.add_argument("--eps-c-u", type=_finite_float, default=0.0)
    sub.add_argument("--x-term", type=_finite_float, default=0.0)
    sub.add_argument("--y", type=_finite_float)
    sub.add_argument("--yp", type=_finite_float)
    sub.add_argument("--u", type=_finite_float, help="current unemployment")
    sub.add_argument("--u-star", type=_finite_float, help="structural unemployment")
    sub.add_argument("--csv", type=Path)

    sub = add("sfa", handle_sfa, "automatic stabiliser contribution")
    sub.add_argument("--delta-sbc", type=_finite_float, required=True)
    sub.add_argument("--delta-sbs", type=_finite_float, required=True)

    sub = add("comply", handle_comply, "fiscal rule compliance")
    _add_observation_flags(sub)
    sub.add_argument("--debt-ratio", type=_finite_float)

    sub = add("classify", handle_classify, "stabiliser taxonomy")
    sub.add_argument("pairs", nargs="*", metavar="KEY=VALUE")

    sub = add("vol", handle_vol, "volatility function analysis")
    sub.add_argument("--k", type=_finite_float, required=True, help="rate of action K")
    sub.add_argument("--b", type=_finite_float, required=True, help="base of action B")
    for name in ("n", "m", "va", "vp", "ca", "cp", "y", "yp"):
        sub.add_argument(f"--{name}", type=_finite_float)
    sub.add_argument("--dvol-dt", type=_finite_float)
    sub.add_argument("--dk-dt", type=_finite_float)
    sub.add_argument("--db-dt", type=_finite_float)

    sub = add("effect", handle_effect, "stabiliser effectiveness dynamics")
    sub.add_argument("--b0", type=_finite_float, required=True)
    sub.add_argument("--t0", type=_finite_float, required=True)
    sub.add_argument("--t1", type=_finite_float, required=True)
    sub.add_argument("--step", type=_finite_float, default=1.0)
    rate = sub.add_mutually_exclusive_group(required=True)
    rate.add_argument("--k-const", type=_finite_float)
    rate.add_argument("--coupling", type=_finite_float, help="c in K = c/B")
    rate.add_argument("--k-file", type=Path, help="CSV with a K column")
    sub.add_argument("--plot-data", type=Path, help="write t,B,K,E as CSV")

    sub = add("simulate", handle_simulate, "logistic base-of-action trajectory")
    sub.add_argument("--b0", type=_finite_float, required=True)
    sub.add_argument("--t0", type=_finite_float, required=True)
    sub.add_argument("--t1", type=_finite_float, required=True)
    sub.add_argument("--step", type=_finite_float, default=1.0)
    sub.add_argument("--tol", type=_finite_float)

    return parser


# =============================================================================
# Entry point
# =============================================================================


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """settings.yaml, then the --config file, then explicit flags."""
    config = load_run_config(args.config)
    overrides = {}
    if getattr(args, "eps_v", None) is not None:
        overrides["epsilon_v"] = args.eps_v
    if getattr(args, "eps_c", None) is not None:
        overrides["epsilon_c"] = args.eps_c
    if args.format is not None:
        overrides["output_format"] = args.format
    return config.model_copy(update=overrides) if overrides else config


def _error_message(e: Exception) -> str:
    if isinstance(e, ValidationError):
        error = e.errors()[0]
        location = ".".join(str(part) for part in error.get("loc", ()))
        return f"{location}: {error.get('msg')}" if location else str(error.get("msg"))
    return str(e)


def _emit_error(e: Exception, subcommand: str | None) -> None:
    payload = {"success": False, "error": _error_message(e), "subcommand": subcommand}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    sys.stderr.flush()


def main(argv: list[str] | None = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:].

    Returns:
        Exit status (0 success, 1 domain error, 2 usage error).
    """
    parser = build_parser()
    args: argparse.Namespace | None = None

    try:
        args = parser.parse_args(argv)
        setup_logging(level=args.log_level, json_format=True if args.json_logs else None)

        config = _resolve_config(args)
        run_logger = get_logger("main", subcommand=args.subcommand)
        run_logger.debug(f"Resolved config {config.model_dump()}")

        report = args.handler(args, config)
        write_output(render(report, config.output_format), args.out)
        run_logger.info(f"Wrote {len(report.results)} result rows")
        return 0

    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    except ConfigError as e:
        _emit_error(e, getattr(args, "subcommand", None))
        return 2

    except (FiscalError, ValidationError) as e:
        subcommand = getattr(args, "subcommand", None)
        get_logger("main", subcommand=str(subcommand)).error(f"Failed: {_error_message(e)}")
        _emit_error(e, subcommand)
        return 1


if __name__ == "__main__":
    sys.exit(main())
