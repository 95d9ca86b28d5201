# pylint: skip-file
"""
Filename: introduction.py

Descriptions:
    Introduces the mechanics of dipoletree via a few examples

    NOTE: Uses simulated data only, nothing is written to disk
"""

def next_step(title: str, first: bool = False):
    """ Helper functions for examples (Doesn't relate to library) """
    notation = "" if first else "\n"
    print(f"{notation}{'='*10} {title} {'='*10}")
    input(">>> Press Enter to see this example...")

""" ============ Simulate censored survival data ============ """

next_step("0: Simulate censored survival data", True)

from dipoletree import preset, simulate

# Hazard grows outside an ellipse around the covariate mean
cfg = preset("elliptical", p=2, n=200, seed=3)
dataset = simulate(cfg)

print(f"Subjects:  {dataset.n}")
print(f"Censored:  {dataset.censored_fraction:.1%}")
print(f"Columns:   {dataset.names}")

" ============ Label dipoles ============ "
next_step("1: Pure and mixed dipoles")

from dipoletree import label_dipoles

labels = label_dipoles(dataset, zeta1=0.3, zeta2=0.6)

print(f"Pure dipoles (close event times):  {labels.pure.shape[0]}")
print(f"Mixed dipoles (far apart times):   {labels.mixed.shape[0]}")

" ============ One kernel split ============ "
next_step("2: One kernel split")

from dipoletree import KernelSpec, fit_split

split = fit_split(dataset, labels, KernelSpec.quadratic(), kappa=1.0)

print(f"Rounds:     {split.rounds}")
print(f"Criterion:  {split.objective:.4f}")
print(f"Right side: {(split.values(dataset.covariates) > 0).sum()} of {dataset.n}")

" ============ Grow, prune and evaluate ============ "
next_step("3: Grow, prune and evaluate a tree")

import numpy as np

from dipoletree import FitConfig, GrowthConfig, evaluate, fit_tree
from dipoletree.core.data import stratified_holdout

train, test = stratified_holdout(dataset, 0.3, np.random.default_rng(0))

result = fit_tree(dataset.subset(train), FitConfig(GrowthConfig(KernelSpec.quadratic())))
report = evaluate(result.tree, dataset.subset(test))

print(f"Grown nodes:   {result.full.n_nodes}")
print(f"Pruned nodes:  {result.tree.n_nodes}")
print(f"Concordance:   {report.ci}")
print(f"IBS:           {report.ibs:.4f}")

" ============ Tune kappa ============ "
next_step("4: Tune kappa by cross validation")

from dipoletree import tune_kappa

tuned = tune_kappa(dataset, FitConfig(GrowthConfig(KernelSpec.quadratic())), etas=(-1.0, 0.0, 1.0), k=5)

for summary in tuned.summaries:
    print(f"eta={summary.eta:+.1f}  CI={summary.mean_ci}  IBS={summary.mean_ibs}")

print(f"Selected kappa: {tuned.best_kappa:.4f}")
