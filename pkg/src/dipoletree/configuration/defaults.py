# pylint: skip-file
# dipoletree\configuration\defaults.py

DEFAULT_CONFIG = """
# ==============================================================
# DipoleTree project configuration
#
# Drop this file in your project root (or any parent folder)
# dipoletree will automatically detect and use it.
# Command line flags still take precedence over these values.
# ==============================================================

[data]
# Column names of the survival outcome
time: time
status: status
# Comma separated columns that are not covariates
exclude:

[splitter]
# linear | quad | poly:d,c | gauss[:variance]
kernel: linear
kappa: 1.0
epsilon: 1.0
zeta1: 0.3
zeta2: 0.6
# Class weights of pure and mixed dipoles
price_pure: 1.0
price_mixed: 1.0
# Reorientation loop
tau: 1e-5
max_rounds: 25

[solver]
tol: 1e-6
max_iter: 20000
rho: 1.0

[tree]
min_node: 15
min_child: 5
alpha_c: 3.0
bootstrap: 0
validation_fraction: 0.25

[tuning]
# eta = log(kappa)
eta_grid: -4, -3, -2, -1, 0, 1, 2, 3, 4
folds: 5
seed: 0
jobs: 1
""".lstrip()


# Package defaults, the value type also fixes how a file entry is parsed
DEFAULTS = {
    "data": {
        "time":                 "time",
        "status":               "status",
        "exclude":              (),
    },
    "splitter": {
        "kernel":               "linear",
        "kappa":                1.0,
        "epsilon":              1.0,
        "zeta1":                0.3,
        "zeta2":                0.6,
        "price_pure":           1.0,
        "price_mixed":          1.0,
        "tau":                  1e-5,
        "max_rounds":           25,
    },
    "solver": {
        "tol":                  1e-6,
        "max_iter":             20000,
        "rho":                  1.0,
    },
    "tree": {
        "min_node":             15,
        "min_child":            5,
        "alpha_c":              3.0,
        "bootstrap":            0,
        "validation_fraction":  0.25,
    },
    "tuning": {
        "eta_grid":             (-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0),
        "folds":                5,
        "seed":                 0,
        "jobs":                 1,
    },
}


# Bootstrap resamples used when --bootstrap is given without a count
DEFAULT_BOOTSTRAP = 25
CONFIG_FILENAME = ".dipoletree"
