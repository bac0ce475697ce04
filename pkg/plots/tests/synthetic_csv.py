"""Synthetic samples.csv writers honoring the benchmark column contract."""

import csv
import math

import numpy as np

COHERENT_HEADER = [
    "sample",
    "xstar_1", "xstar_2", "xstar_3",
    "conv_at_xstar", "conv_ok_at_xstar",
    "lower_bound", "relaxation_status", "rank_ratio",
    "f_relax_at_xstar", "f_relax_at_xhat",
    "xhat_1", "xhat_2", "xhat_3",
    "conv_at_xhat", "conv_ok_at_xhat",
    "objective_at_xstar", "objective_at_xhat",
    "true_residual", "status",
]

IDENTIFY_HEADER = [
    "sample",
    "x_1", "x_2", "x_3",
    "lower_bound", "relaxation_status", "rank_ratio",
    "f_relax_at_ztrue", "f_relax_at_zhat",
    "zhat_1", "zhat_2",
    "objective_at_ztrue", "objective_at_zhat",
    "err_z1", "err_z2",
    "max_err", "orbit_symmetric", "status",
]


def write_coherent_csv(path, n, seed=0):
    """Synthetic bench-coherent output honoring the column contract."""
    rng = np.random.default_rng(seed)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COHERENT_HEADER)
        for i in range(n):
            conv_star = rng.uniform(0.3, math.pi - 0.1)
            conv_hat = rng.uniform(0.3, math.pi - 0.1)
            f_star = rng.uniform(1e-5, 1e-3)
            lb = f_star - rng.uniform(0, 1e-6)
            w.writerow(
                [i]
                + [repr(float(v)) for v in rng.uniform(-1, 1, 3)]
                + [repr(float(conv_star)), 1, repr(float(lb)), "optimal", repr(1e-8)]
                + [repr(float(f_star)), repr(f_star * 0.9)]
                + [repr(float(v)) for v in rng.uniform(-1, 1, 3)]
                + [repr(float(conv_hat)), 1, repr(float(rng.uniform(0, 1e-8))),
                   repr(float(rng.uniform(0, 1e-10))), repr(float(rng.uniform(0, 1e-4))), "ok"]
            )


def write_identify_csv(path, n, seed=0):
    rng = np.random.default_rng(seed)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(IDENTIFY_HEADER)
        for i in range(n):
            e1, e2 = rng.uniform(0, 5e-4, 2)
            w.writerow(
                [i]
                + [repr(float(v)) for v in rng.uniform(-1, 1, 3)]
                + [repr(float(rng.uniform(0, 1e-5))), "optimal", repr(1e-8)]
                + [repr(float(rng.uniform(0, 1e-10))), repr(float(rng.uniform(0, 1e-10)))]
                + [repr(float(0.707107 + e1)), repr(float(1.0 - e2))]
                + [repr(float(rng.uniform(0, 1e-10))), repr(float(rng.uniform(0, 1e-10)))]
                + [repr(float(e1)), repr(float(e2)), repr(float(max(e1, e2))), 1, "ok"]
            )
