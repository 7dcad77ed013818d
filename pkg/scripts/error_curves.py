"""Mean local Wasserstein error against sample count on the sinc cloud."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from _common import METHODS, select, write_rows
from vcsample import sample_error
from vcsample.generators import generate_sinc


@dataclass
class Config:
    n: int = 50000
    counts: tuple = (500, 1000, 2500, 5000, 10000)
    methods: tuple = ("vc", "random", "kdtree", "poisson")
    seeds: tuple = field(default_factory=lambda: tuple(range(3)))
    out: str = None


def run(cfg: Config):
    rows = []
    for count in cfg.counts:
        for method in cfg.methods:
            errs, got = [], []
            for seed in cfg.seeds:
                cloud = generate_sinc(cfg.n, seed=seed)
                res = select(cloud, method, count, seed)
                errs.append(sample_error(cloud, res.indices_by_rank).mean)
                got.append(res.count)
            rows.append((count, method, int(np.median(got)), float(np.median(errs))))
            print(f"{count:>7} {method:<15} samples {rows[-1][2]:>7}  median error {rows[-1][3]:.5f}")
    if cfg.out:
        write_rows(cfg.out, ("target", "method", "samples", "median_error"), rows)
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--counts", type=int, nargs="+", default=list(Config.counts))
    ap.add_argument("--methods", nargs="+", choices=METHODS, default=list(Config.methods))
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--out", default=None, help="CSV output")
    a = ap.parse_args()
    run(Config(a.n, tuple(a.counts), tuple(a.methods), tuple(range(a.seeds)), a.out))
