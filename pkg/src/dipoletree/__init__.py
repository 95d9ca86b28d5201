# pylint: skip-file
# dipoletree/__init__.py

from dipoletree.core.data import CsvSchema, Dataset, label_dipoles, load_csv, write_csv
from dipoletree.core.kernel import KernelSpec
from dipoletree.core.qp import SolverConfig
from dipoletree.core.splitter import PriceFactors, SplitModel, fit_split
from dipoletree.tree.survival import kaplan_meier, km_median, logrank_statistic
from dipoletree.tree.growth import GrowthConfig, SurvivalTree, grow, predict_median
from dipoletree.tree.pruning import prune_sequence, select_subtree, split_complexity
from dipoletree.tree.fitting import FitConfig, fit_tree
from dipoletree.tree.serialization import read_model, write_model
from dipoletree.evaluation.metrics import concordance_index, evaluate, integrated_brier
from dipoletree.evaluation.tuning import cross_validate, tune_kappa
from dipoletree.simulation.hazards import HazardSpec, SimConfig, preset, simulate
from dipoletree.configuration.management import reload_config
from dipoletree.utilities.errors import DataError, NumericalError, UsageError

__version__ = "0.1.0"


# API Promises
__all__ = [
    "CsvSchema",
    "Dataset",
    "label_dipoles",
    "load_csv",
    "write_csv",
    "KernelSpec",
    "SolverConfig",
    "PriceFactors",
    "SplitModel",
    "fit_split",
    "kaplan_meier",
    "km_median",
    "logrank_statistic",
    "GrowthConfig",
    "SurvivalTree",
    "grow",
    "predict_median",
    "prune_sequence",
    "select_subtree",
    "split_complexity",
    "FitConfig",
    "fit_tree",
    "read_model",
    "write_model",
    "concordance_index",
    "evaluate",
    "integrated_brier",
    "cross_validate",
    "tune_kappa",
    "HazardSpec",
    "SimConfig",
    "preset",
    "simulate",
    "reload_config",
    "DataError",
    "NumericalError",
    "UsageError",
]
