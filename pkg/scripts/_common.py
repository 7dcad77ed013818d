"""Helpers shared by the experiment scripts."""

from __future__ import annotations

import csv
import warnings

from vcsample import BaselineSpec, SamplerConfig, run_baseline, sample

METHODS = ("vc", "vc_entropy", "random", "entropy_random", "kdtree", "poisson")


def select(cloud, method: str, count: int, seed: int):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if method == "vc":
            return sample(cloud, SamplerConfig(count, rng_seed=seed))
        if method == "vc_entropy":
            return sample(cloud, SamplerConfig(count, rng_seed=seed, mode="entropy"))
    kind = {"random": "random", "entropy_random": "entropy_random",
            "kdtree": "stratified_kdtree", "poisson": "poisson_disk"}[method]
    return run_baseline(cloud, BaselineSpec(kind, rng_seed=seed), count)


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
