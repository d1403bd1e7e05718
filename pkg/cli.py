"""
Command-line front end.

    python cli.py analytic --config configs/power_law.json --out curve.csv
    python cli.py compare --config configs/power_law.json --desk --tolerance 0.03

Every command reads a JSON run configuration and writes a CurveReport (CSV)
to --out, to the path in the config's "outputs" section, or to stdout.
Logs go to stderr; the level comes from LOG_LEVEL (default INFO) or --verbose.

Exit statuses: 0 ok, 1 usage or configuration error, 2 numerical failure,
3 sup deviation above the --tolerance given to compare.
"""

import argparse
import logging
import os
import sys
import time
from typing import List, Optional, Sequence

import numpy as np

from analytic_engine import analytic_curve, optimize_guard_zone, scaling_limit_cdf, scaling_limit_sir
from errors import ConfigError, DomainError, NumericError
from exporter import (
    CurveReport, export_realizations, export_samples, export_to_xlsx, format_cell,
    report_metadata, write_report,
)
from ledger import list_runs, record_run
from mmse_monte_carlo import EmpiricalCdf, run_trials, sup_deviation
from models import CustomRadialProfile, HardCoreApprox, PiecewisePowerLaw, pathloss_from_dict
from point_process import SimWindow, sample, trial_rng, validate_window
from run_config import RunConfig, load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_TOLERANCE = 3


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def configure_logging(verbose: bool = False):
    if verbose:
        level = logging.DEBUG
    else:
        level = getattr(logging, os.environ.get("LOG_LEVEL", "INFO").upper(), logging.INFO)
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    # scipy reports integration trouble through warnings
    logging.captureWarnings(True)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _simulate(config: RunConfig, model=None, params=None, **kwargs) -> EmpiricalCdf:
    return run_trials(
        model if model is not None else config.model,
        params if params is not None else config.system,
        config.trials, config.seed, threads=config.threads,
        gamma_max=config.gamma_max, tail_tolerance=config.tail_tolerance,
        hard_core=config.hard_core_sampler, **kwargs)


def _write_samples(config: RunConfig, emp: EmpiricalCdf):
    if config.outputs.samples and emp.by_trial is not None:
        export_samples(emp.by_trial, config.outputs.samples)


def cmd_analytic(config: RunConfig) -> CurveReport:
    """Analytic outage CDF over the configured SINR grid."""
    started = time.perf_counter()
    params = config.system
    sinr = config.gamma_grid.sinr_values()
    curve = analytic_curve(params, config.model, config.gamma_grid.gamma_values(params))
    rows = [(s, g, f) for s, g, f in zip(sinr.tolist(), curve.gamma_grid, curve.cdf_values)]
    meta = report_metadata(config.config_hash, runtime=time.perf_counter() - started,
                           snr_db=config.snr_db, sigma2=params.sigma2)
    return CurveReport("analytic", ("sinr", "gamma", "analytic_cdf"), rows, meta)


def cmd_simulate(config: RunConfig) -> CurveReport:
    """Empirical CDF from Monte Carlo trials, read off at the configured SINR grid."""
    started = time.perf_counter()
    params = config.system
    emp = _simulate(config)
    _write_samples(config, emp)
    sinr = config.gamma_grid.sinr_values()
    gamma = config.gamma_grid.gamma_values(params)
    rows = list(zip(sinr.tolist(), gamma.tolist(), np.asarray(emp(sinr), dtype=float).tolist()))
    meta = report_metadata(config.config_hash, config.seed, config.trials,
                           time.perf_counter() - started, discarded=emp.discarded,
                           snr_db=config.snr_db, sigma2=params.sigma2)
    return CurveReport("simulate", ("sinr", "gamma", "empirical_cdf"), rows, meta)


def cmd_compare(config: RunConfig) -> CurveReport:
    """Analytic and empirical CDFs side by side with their pointwise and sup deviation."""
    started = time.perf_counter()
    params = config.system
    sinr = config.gamma_grid.sinr_values()
    curve = analytic_curve(params, config.model, config.gamma_grid.gamma_values(params))
    emp = _simulate(config)
    _write_samples(config, emp)
    empirical = np.asarray(emp(sinr), dtype=float)
    analytic = np.asarray(curve.cdf_values)
    rows = list(zip(sinr.tolist(), curve.gamma_grid, analytic.tolist(), empirical.tolist(),
                    np.abs(analytic - empirical).tolist()))
    sup = sup_deviation(emp, curve)
    logger.info("[CLI] sup deviation %.4g over %d trials", sup, config.trials)
    meta = report_metadata(config.config_hash, config.seed, config.trials,
                           time.perf_counter() - started, discarded=emp.discarded,
                           sup_deviation=sup, tolerance=config.tolerance,
                           snr_db=config.snr_db, sigma2=params.sigma2)
    return CurveReport("compare", ("sinr", "gamma", "analytic_cdf", "empirical_cdf", "deviation"),
                       rows, meta)


def compare_status(report: CurveReport, tolerance: Optional[float]) -> int:
    """0 iff no tolerance is set or the sup deviation stays within it."""
    if tolerance is None:
        return EXIT_OK
    sup = float(report.metadata["sup_deviation"])
    if sup <= tolerance:
        return EXIT_OK
    logger.warning("[CLI] sup deviation %.4g exceeds tolerance %.4g", sup, tolerance)
    return EXIT_TOLERANCE


def cmd_scaling_demo(config: RunConfig, L_list: Optional[Sequence[int]] = None,
                     ell_ratio: Optional[float] = None, simulate: bool = True) -> CurveReport:
    """
    Outage curves with the interferer density growing in proportion to L.

    The configured model is the nominal shape; antenna count L uses the model
    scaled by ell_ratio * L. The "limit" column is the step the curves
    approach as L grows.
    """
    if L_list is None or ell_ratio is None:
        if config.scaling is None:
            raise ConfigError("scaling demonstration needs a 'scaling' section", field="scaling")
        L_list = L_list or config.scaling.L_list
        ell_ratio = ell_ratio or config.scaling.ell_ratio
    started = time.perf_counter()
    params = config.system
    sinr = config.gamma_grid.sinr_values()
    gammas = config.gamma_grid.gamma_values(params)
    limit_sir = scaling_limit_sir(config.model, ell_ratio, params.alpha, params.r_T)
    logger.info("[CLI] scaling limit SIR %.6g for ell=%g", limit_sir, ell_ratio)

    columns: List[str] = ["sinr"]
    data: List[List[float]] = [sinr.tolist()]
    summary = {"ell_ratio": ell_ratio, "limit_sir": limit_sir}
    for L in L_list:
        scaled_params = params.with_antennas(L)
        scaled_model = config.model.scaled(ell_ratio * L)
        curve = analytic_curve(scaled_params, scaled_model, gammas)
        columns.append(f"analytic_L{L}")
        data.append(list(curve.cdf_values))
        if simulate:
            emp = _simulate(config, scaled_model, scaled_params)
            columns.append(f"empirical_L{L}")
            data.append(np.asarray(emp(sinr), dtype=float).tolist())
            q1, median, q3 = (emp.quantile(q) for q in (0.25, 0.5, 0.75))
            summary[f"median_sir_L{L}"] = median
            summary[f"iqr_sir_L{L}"] = q3 - q1
    columns.append("limit")
    data.append([scaling_limit_cdf(config.model, ell_ratio, params.alpha, float(g)) for g in gammas])
    meta = report_metadata(config.config_hash, config.seed if simulate else None,
                           config.trials if simulate else None, time.perf_counter() - started,
                           **summary)
    return CurveReport("scaling-demo", tuple(columns), list(zip(*data)), meta)


def cmd_optimize_guard(config: RunConfig, outage_targets: Optional[Sequence[float]] = None) -> CurveReport:
    """Guard radius maximising the spectral efficiency density, one row per outage target."""
    if not isinstance(config.model, HardCoreApprox):
        raise ConfigError("guard-zone optimisation needs a hard_core model", field="model.type")
    guard = config.guard
    if outage_targets is None:
        if guard is None:
            raise ConfigError("guard-zone optimisation needs a 'guard' section", field="guard")
        outage_targets = guard.outage_targets
    started = time.perf_counter()
    rows = []
    for target in outage_targets:
        result = optimize_guard_zone(config.system, config.model.parent_density, target,
                                     r1_max=guard.r1_max if guard else None,
                                     r1_points=guard.r1_points if guard else 50)
        best = int(np.argmax(result.grid_eta))
        rows.append((target, result.r1_opt, result.eta, result.grid_r1[best],
                     result.grid_eta[best], "true" if result.near_flat else "false"))
    meta = report_metadata(config.config_hash, runtime=time.perf_counter() - started,
                           parent_density=config.model.parent_density)
    return CurveReport("optimize-guard", ("outage_target", "r1_opt", "eta", "grid_r1",
                                          "grid_eta", "near_flat"), rows, meta)


def cmd_equiv_pathloss(config: RunConfig) -> CurveReport:
    """
    Three CDFs of the same network: simulated with the path-loss law phi on a
    homogeneous network, simulated with the equivalent intensity under
    r**-alpha, and the analytic curve of the equivalent intensity.
    """
    model = config.model
    source = model.source if isinstance(model, CustomRadialProfile) else None
    if not source or source.get("type") != "equivalent_pathloss":
        raise ConfigError("path-loss equivalence needs an equivalent_pathloss model", field="model.type")
    params = config.system
    if source["alpha"] != params.alpha:
        raise ConfigError("model alpha must equal system alpha", field="model.alpha")
    pathloss = pathloss_from_dict(source["pathloss"], "model.pathloss")
    density = source["base_density"] * source.get("scale", 1.0)

    started = time.perf_counter()
    sinr = config.gamma_grid.sinr_values()
    curve = analytic_curve(params, model, config.gamma_grid.gamma_values(params))
    equivalent = _simulate(config)
    _write_samples(config, equivalent)

    # points of the phi network within r map onto equivalent points within phi(r)**(-1/alpha)
    window = validate_window(model, params.alpha, config.gamma_max, config.tail_tolerance)
    y = window.outer_radius ** -params.alpha
    if not pathloss.value_at_infinity < y < pathloss.value_at_zero:
        raise ConfigError("window lies outside the range of the path-loss law", field="model.pathloss")
    direct_window = SimWindow(pathloss.inverse(y), window.tail_bound)
    direct = _simulate(config, PiecewisePowerLaw.single(density), pathloss=pathloss, window=direct_window)

    analytic = np.asarray(curve.cdf_values)
    direct_cdf = np.asarray(direct(sinr), dtype=float)
    equivalent_cdf = np.asarray(equivalent(sinr), dtype=float)
    rows = list(zip(sinr.tolist(), curve.gamma_grid, analytic.tolist(),
                    direct_cdf.tolist(), equivalent_cdf.tolist()))
    sup_direct = sup_deviation(direct, curve)
    sup_equivalent = sup_deviation(equivalent, curve)
    meta = report_metadata(
        config.config_hash, config.seed, config.trials, time.perf_counter() - started,
        discarded=direct.discarded + equivalent.discarded,
        sup_deviation=max(sup_direct, sup_equivalent),
        sup_deviation_direct=sup_direct, sup_deviation_equivalent=sup_equivalent,
    )
    return CurveReport("equiv-pathloss", ("sinr", "gamma", "analytic_cdf", "direct_cdf", "equivalent_cdf"),
                       rows, meta)


def cmd_dump_realization(config: RunConfig, output_path: str, count: int = 1) -> int:
    """Write the interferer positions of the first `count` trials; returns the point count."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    window = validate_window(config.model, config.system.alpha, config.gamma_max, config.tail_tolerance)
    realizations = (
        (i, sample(config.model, window, trial_rng(config.seed, i), (config.seed, i),
                   config.hard_core_sampler))
        for i in range(count)
    )
    return export_realizations(realizations, output_path)


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------

def _load(args) -> RunConfig:
    config = load_config(args.config)
    return config.with_overrides(seed=args.seed, trials=args.trials, threads=args.threads,
                                 tolerance=args.tolerance, desk=args.desk)


def _emit(report: CurveReport, config: RunConfig, args):
    output_path = args.out or config.outputs.csv
    if output_path:
        write_report(report, output_path)
    else:
        sys.stdout.write(report.to_csv_text())
    xlsx_path = args.xlsx or config.outputs.xlsx
    if xlsx_path:
        export_to_xlsx(report, xlsx_path)


def _run_report_command(args) -> int:
    config = _load(args)
    if args.command == "analytic":
        report = cmd_analytic(config)
    elif args.command == "simulate":
        report = cmd_simulate(config)
    elif args.command == "compare":
        report = cmd_compare(config)
    elif args.command == "scaling-demo":
        report = cmd_scaling_demo(config, args.L, args.ell_ratio, simulate=not args.analytic_only)
    elif args.command == "optimize-guard":
        report = cmd_optimize_guard(config, args.target)
    else:
        report = cmd_equiv_pathloss(config)
    _emit(report, config, args)

    status = EXIT_OK
    if args.command == "compare":
        status = compare_status(report, config.tolerance)
    if args.ledger:
        sup = report.metadata.get("sup_deviation")
        record_run(args.command, config.config_hash, status, config_path=args.config,
                   seed=config.seed if "seed" in report.metadata else None,
                   trials=config.trials if "trials" in report.metadata else None,
                   discarded=int(report.metadata.get("discarded", 0)),
                   sup_deviation=float(sup) if sup is not None else None,
                   tolerance=config.tolerance,
                   runtime_s=float(report.metadata["runtime_s"]))
    return status


def _run_dump(args) -> int:
    config = _load(args)
    output_path = args.out or config.outputs.realization
    if not output_path:
        raise ConfigError("dump-realization needs --out or outputs.realization", field="outputs.realization")
    cmd_dump_realization(config, output_path, args.count)
    return EXIT_OK


def _run_history(args) -> int:
    records = list_runs(args.limit)
    fields = ["id", "created_at", "command", "config_hash", "seed", "trials", "discarded",
              "sup_deviation", "tolerance", "runtime_s", "exit_status"]
    sys.stdout.write(",".join(fields) + "\n")
    for record in records:
        row = record.to_dict()
        sys.stdout.write(",".join("" if row[f] is None else format_cell(row[f]) for f in fields) + "\n")
    return EXIT_OK


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Run configuration (JSON)")
    common.add_argument("--seed", type=int, help="Override the configured seed")
    common.add_argument("--trials", type=int, help="Override the configured trial count")
    common.add_argument("--threads", type=int, help="Worker threads for Monte Carlo trials")
    common.add_argument("--tolerance", type=float, help="Largest acceptable sup deviation (compare)")
    common.add_argument("--out", help="Output CSV path (default: outputs.csv or stdout)")
    common.add_argument("--xlsx", help="Also write an Excel workbook")
    common.add_argument("--desk", action="store_true", help="Use the reduced desk trial count")
    common.add_argument("--ledger", action="store_true", help="Record the run in the ledger database")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = ArgumentParser(prog="cli.py", description="MMSE outage curves for random networks")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("analytic", "analytic outage CDF"),
                       ("simulate", "Monte Carlo outage CDF"),
                       ("compare", "analytic vs Monte Carlo with sup deviation"),
                       ("equiv-pathloss", "path-loss equivalence check")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.set_defaults(handler=_run_report_command)

    p = sub.add_parser("scaling-demo", parents=[common], help="curves as L and density grow together")
    p.add_argument("--L", type=int, nargs="+", help="Antenna counts (default: scaling.L_list)")
    p.add_argument("--ell-ratio", type=float, help="Density per antenna (default: scaling.ell_ratio)")
    p.add_argument("--analytic-only", action="store_true", help="Skip the Monte Carlo columns")
    p.set_defaults(handler=_run_report_command)

    p = sub.add_parser("optimize-guard", parents=[common], help="optimal guard-zone radius")
    p.add_argument("--target", type=float, action="append",
                   help="Outage target, repeatable (default: guard.outage_target)")
    p.set_defaults(handler=_run_report_command)

    p = sub.add_parser("dump-realization", parents=[common], help="write interferer positions")
    p.add_argument("--count", type=int, default=1, help="Number of trials to dump")
    p.set_defaults(handler=_run_dump)

    p = sub.add_parser("history", help="list ledger records")
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(handler=_run_history)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error("[CLI] configuration error: %s", e)
        return EXIT_USAGE
    except NumericError as e:
        if e.best_estimate is not None:
            logger.error("[CLI] numerical failure: %s (best estimate %r)", e, e.best_estimate)
        else:
            logger.error("[CLI] numerical failure: %s", e)
        return EXIT_NUMERIC
    except DomainError as e:
        logger.error("[CLI] invalid argument: %s", e)
        return EXIT_NUMERIC
    except OSError as e:
        logger.error("[CLI] %s", e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
