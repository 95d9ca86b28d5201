"""
Filename: cli.py

Description:
    Command line entry points: generate the '.dipoletree' settings
    file, fit / predict / evaluate trees, tune kappa, cross validate
    and simulate data.

    NOTE: Exit codes are 0 success, 2 usage, 3 data, 4 numerical.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import pandas as pd

from dipoletree.configuration.defaults import CONFIG_FILENAME, DEFAULT_BOOTSTRAP, DEFAULT_CONFIG
from dipoletree.configuration.management import get_settings
from dipoletree.core.data import CsvSchema, load_csv, write_csv
from dipoletree.core.kernel import KernelSpec
from dipoletree.core.qp import SolverConfig
from dipoletree.core.splitter import PriceFactors
from dipoletree.evaluation.metrics import evaluate
from dipoletree.evaluation.tuning import cross_validate, tune_kappa
from dipoletree.simulation.hazards import preset, preset_names, simulate
from dipoletree.tree.fitting import FitConfig, fit_tree
from dipoletree.tree.growth import GrowthConfig
from dipoletree.tree.serialization import read_model, write_model
from dipoletree.utilities.errors import ConfigError, DataError, NumericalError, UsageError

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4


def _pick(value: Any, settings: dict[str, dict[str, Any]], section: str, key: str) -> Any:
    """ Flag value when given, else the effective setting """
    return settings[section][key] if value is None else value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from e


def _name_list(text: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in text.split(",") if item.strip())


def _schema(args: argparse.Namespace, settings: dict[str, dict[str, Any]]) -> CsvSchema:
    return CsvSchema(
        _pick(args.time_col, settings, "data", "time"),
        _pick(args.status_col, settings, "data", "status"),
        tuple(_pick(args.exclude, settings, "data", "exclude")),
    )


def _growth_config(args: argparse.Namespace, settings: dict[str, dict[str, Any]]) -> GrowthConfig:
    splitter = settings["splitter"]
    return GrowthConfig(
        kernel=KernelSpec.parse(_pick(args.kernel, settings, "splitter", "kernel")),
        kappa=_pick(args.kappa, settings, "splitter", "kappa"),
        epsilon=_pick(args.epsilon, settings, "splitter", "epsilon"),
        zeta1=_pick(args.zeta1, settings, "splitter", "zeta1"),
        zeta2=_pick(args.zeta2, settings, "splitter", "zeta2"),
        min_node=_pick(args.min_node, settings, "tree", "min_node"),
        min_child=_pick(args.min_child, settings, "tree", "min_child"),
        tau=splitter["tau"],
        max_rounds=splitter["max_rounds"],
        solver=SolverConfig(
            tol=_pick(args.qp_tol, settings, "solver", "tol"),
            max_iter=_pick(args.qp_max_iter, settings, "solver", "max_iter"),
            rho=_pick(args.qp_rho, settings, "solver", "rho"),
        ),
        price=PriceFactors(splitter["price_pure"], splitter["price_mixed"]),
    )


def _fit_config(args: argparse.Namespace, settings: dict[str, dict[str, Any]]) -> FitConfig:
    return FitConfig(
        growth=_growth_config(args, settings),
        alpha_c=_pick(args.alpha_c, settings, "tree", "alpha_c"),
        bootstrap=_pick(args.bootstrap, settings, "tree", "bootstrap"),
        validation_fraction=settings["tree"]["validation_fraction"],
        seed=_pick(args.seed, settings, "tuning", "seed"),
    )


def _write_json(path: Path, record: dict[str, Any]) -> None:
    path.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")


def generate(args: argparse.Namespace) -> int:
    """ Generates the '.dipoletree' file in the working directory """
    target = Path.cwd() / CONFIG_FILENAME
    if target.exists() and not args.force:
        print(f"Warning: {CONFIG_FILENAME} already exists at {target}")
        reply = input("Overwrite? (y/N): ").strip().lower()

        # Anything but an explicit yes keeps the old file
        if reply != "y":
            print("Aborted. No changes made.")
            return EXIT_OK

    target.write_text(DEFAULT_CONFIG.strip() + "\n", encoding="utf-8")
    print(f"Successfully created {CONFIG_FILENAME} at:\n   {target}")
    print("\n Edit it to change the kernel, kappa, tree sizes or tuning grid.")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    """ Grows, prunes and writes a model plus its fit report """
    settings = get_settings()
    dataset = load_csv(args.data, _schema(args, settings))
    cfg = _fit_config(args, settings)

    result = fit_tree(dataset, cfg)
    report = result.report()
    metadata = {"source": Path(args.data).name, "fit": cfg.to_dict(), "selection": {
        "alpha_c": cfg.alpha_c, "selected": result.selected, "nodes": report["nodes"]
    }}

    out = Path(args.out)
    write_model(out, result.tree, metadata)
    report_path = Path(args.report) if args.report else out.with_suffix(".report.json")
    _write_json(report_path, report)

    print(f"Model written to {out} ({report['nodes']} nodes grown, {report['nodes_pruned']} after pruning)")
    for split in report["splits"]:
        print(f"  node {split['node_id']:>3}: log-rank {split['logrank']:.4f} (p = {split['p_value']:.4g})")

    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    """ Writes predicted medians and leaf ids for every row """
    settings = get_settings()
    tree = read_model(args.model)
    dataset = load_csv(args.data, _schema(args, settings), tree.standardization, tree.covariates or None)

    nodes = tree.nodes()
    leaves = tree.route(dataset.covariates)
    frame = pd.DataFrame({
        "median": [nodes[int(leaf)].median for leaf in leaves],
        "leaf_id": leaves,
        "median_reached": [int(nodes[int(leaf)].median_reached) for leaf in leaves],
    })

    if args.out:
        frame.to_csv(args.out, index=False, float_format="%.12g")
        print(f"Predictions for {dataset.n} rows written to {args.out}")
    else:
        print(frame.to_csv(index=False, float_format="%.12g"), end="")

    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    """ Scores a model on a test CSV """
    settings = get_settings()
    tree = read_model(args.model)
    dataset = load_csv(args.data, _schema(args, settings), tree.standardization, tree.covariates or None)

    report = evaluate(tree, dataset)
    ci = "undefined" if report.ci is None else f"{report.ci:.4f}"
    print(f"n = {report.n_test}  CI = {ci}  IBS = {report.ibs:.4f}")

    if args.out:
        _write_json(Path(args.out), report.to_dict())

    if args.curve_out:
        curve = pd.DataFrame(report.brier_curve, columns=["time", "brier"])
        curve.to_csv(args.curve_out, index=False, float_format="%.12g")

    return EXIT_OK


def cmd_tune(args: argparse.Namespace) -> int:
    """ k-fold search of eta = log(kappa) """
    settings = get_settings()
    dataset = load_csv(args.data, _schema(args, settings))
    cfg = _fit_config(args, settings)

    etas = _pick(args.eta_grid, settings, "tuning", "eta_grid")
    folds = _pick(args.folds, settings, "tuning", "folds")
    jobs = _pick(args.jobs, settings, "tuning", "jobs")

    result = tune_kappa(dataset, cfg, etas, folds, cfg.seed, jobs)
    for summary in result.summaries:
        ci, ibs = summary.mean_ci, summary.mean_ibs
        ci_text = "undefined" if ci is None else f"{ci:.4f}"
        ibs_text = "undefined" if ibs is None else f"{ibs:.4f}"
        print(f"eta = {summary.eta:+.2f}  kappa = {summary.kappa:.4g}  CI = {ci_text}  IBS = {ibs_text}")

    print(f"Best eta = {result.best_eta:g} (kappa = {result.best_kappa:.6g})")

    if args.out:
        _write_json(Path(args.out), result.to_dict())

    if args.table_out:
        pd.DataFrame(result.table()).to_csv(args.table_out, index=False, float_format="%.12g")

    return EXIT_OK


def cmd_crossval(args: argparse.Namespace) -> int:
    """ k-fold evaluation of the full fit pipeline """
    settings = get_settings()
    dataset = load_csv(args.data, _schema(args, settings))
    cfg = _fit_config(args, settings)
    jobs = _pick(args.jobs, settings, "tuning", "jobs")

    summary = cross_validate(dataset, cfg, args.folds, cfg.seed, jobs)
    record = summary.to_dict()
    for name in ("ci", "ibs", "nodes", "nodes_pruned"):
        mean, sd = record[f"{name}_mean"], record[f"{name}_sd"]
        text = "undefined" if mean is None else f"{mean:.4f} (sd {sd:.4f})"
        print(f"{name:>13}: {text}")

    if args.out:
        _write_json(Path(args.out), {"summary": record, "folds": [fold.to_dict() for fold in summary.folds]})

    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    """ Writes a simulated dataset and its sidecar config record """
    cfg = preset(args.preset, args.p, args.n, args.seed)
    dataset = simulate(cfg)

    out = Path(args.out)
    write_csv(dataset, out)
    record = {**cfg.to_dict(), "censored_fraction": dataset.censored_fraction}
    _write_json(out.with_suffix(".json"), record)

    print(f"Wrote {dataset.n} rows to {out}; censored fraction {dataset.censored_fraction:.4f}")
    return EXIT_OK


def _data_options() -> argparse.ArgumentParser:
    """ Column mapping flags shared by every data reading command """
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--time-col", dest="time_col", help="time column name")
    parent.add_argument("--status-col", dest="status_col", help="status column name (1 = event)")
    parent.add_argument("--exclude", type=_name_list, help="comma separated columns to ignore")
    return parent


def _fit_options() -> argparse.ArgumentParser:
    """ Tree, splitter and solver flags """
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--kernel", help="linear | quad | poly:d,c | gauss[:variance]")
    parent.add_argument("--kappa", type=float, help="ridge weight kappa > 0")
    parent.add_argument("--epsilon", type=float, help="hinge margin")
    parent.add_argument("--zeta1", type=float, help="pure dipole percentile")
    parent.add_argument("--zeta2", type=float, help="mixed dipole percentile")
    parent.add_argument("--min-node", dest="min_node", type=int, help="smallest node that is split")
    parent.add_argument("--min-child", dest="min_child", type=int, help="smallest allowed child")
    parent.add_argument("--alpha-c", dest="alpha_c", type=float, help="split complexity threshold")
    parent.add_argument(
        "--bootstrap", type=int, nargs="?", const=DEFAULT_BOOTSTRAP,
        help=f"bootstrap resamples instead of a validation split (default {DEFAULT_BOOTSTRAP})"
    )
    parent.add_argument("--seed", type=int, help="random seed")
    parent.add_argument("--qp-tol", dest="qp_tol", type=float, help="QP residual tolerance")
    parent.add_argument("--qp-max-iter", dest="qp_max_iter", type=int, help="QP iteration limit")
    parent.add_argument("--qp-rho", dest="qp_rho", type=float, help="ADMM step size")
    return parent


def build_parser() -> argparse.ArgumentParser:
    """ Adds the argparse arguments """
    parser = argparse.ArgumentParser(
        prog="dipoletree", description="dipoletree: kernel dipole-splitting survival trees"
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--quiet", action="store_true", help="errors only")

    data, fitting = _data_options(), _fit_options()
    subparsers = parser.add_subparsers()

    gen_parser = subparsers.add_parser(
        "generate", help=f"Create a default {CONFIG_FILENAME} file in the current directory"
    )
    gen_parser.add_argument("--force", action="store_true", help="overwrite without asking")
    gen_parser.set_defaults(func=generate)

    fit_parser = subparsers.add_parser("fit", parents=[data, fitting], help="grow, prune and save a tree")
    fit_parser.add_argument("data", help="training CSV")
    fit_parser.add_argument("--out", required=True, help="model file")
    fit_parser.add_argument("--report", help="fit report (default <out>.report.json)")
    fit_parser.set_defaults(func=cmd_fit)

    predict_parser = subparsers.add_parser("predict", parents=[data], help="predicted medians and leaf ids")
    predict_parser.add_argument("model", help="model file")
    predict_parser.add_argument("data", help="CSV to predict")
    predict_parser.add_argument("--out", help="predictions CSV (default stdout)")
    predict_parser.set_defaults(func=cmd_predict)

    eval_parser = subparsers.add_parser("evaluate", parents=[data], help="CI, IBS and Brier curve on test data")
    eval_parser.add_argument("model", help="model file")
    eval_parser.add_argument("data", help="test CSV")
    eval_parser.add_argument("--out", help="report file")
    eval_parser.add_argument("--curve-out", dest="curve_out", help="Brier curve CSV")
    eval_parser.set_defaults(func=cmd_evaluate)

    tune_parser = subparsers.add_parser("tune", parents=[data, fitting], help="select kappa by k-fold CV")
    tune_parser.add_argument("data", help="training CSV")
    tune_parser.add_argument("--eta-grid", dest="eta_grid", type=_float_list, help="comma separated eta values")
    tune_parser.add_argument("--folds", type=int, help="number of folds")
    tune_parser.add_argument("--jobs", type=int, help="parallel cells")
    tune_parser.add_argument("--out", help="tuning report file")
    tune_parser.add_argument("--table-out", dest="table_out", help="CV table CSV")
    tune_parser.set_defaults(func=cmd_tune)

    cv_parser = subparsers.add_parser("crossval", parents=[data, fitting], help="k-fold evaluation of the fit")
    cv_parser.add_argument("data", help="CSV")
    cv_parser.add_argument("--folds", type=int, help="number of folds (default 10 below n = 500, else 20)")
    cv_parser.add_argument("--jobs", type=int, help="parallel folds")
    cv_parser.add_argument("--out", help="report file")
    cv_parser.set_defaults(func=cmd_crossval)

    sim_parser = subparsers.add_parser("simulate", help="simulate censored data from a hazard preset")
    sim_parser.add_argument("--preset", required=True, help=f"one of {preset_names()}")
    sim_parser.add_argument("--p", type=int, default=2, help="covariate dimension (2, 4 or 7)")
    sim_parser.add_argument("--n", type=int, default=200, help="number of subjects")
    sim_parser.add_argument("--seed", type=int, default=0, help="random seed")
    sim_parser.add_argument("--out", required=True, help="CSV file")
    sim_parser.set_defaults(func=cmd_simulate)

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    """ Runs one command and returns its exit code """
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        # If there is no functions to execute, prints help and exits
        parser.print_help()
        return EXIT_OK

    _configure_logging(args)
    try:
        return args.func(args)

    except (UsageError, ConfigError) as e:
        print(f"dipoletree: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except (DataError, OSError) as e:
        print(f"dipoletree: data error: {e}", file=sys.stderr)
        return EXIT_DATA

    except NumericalError as e:
        print(f"dipoletree: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
