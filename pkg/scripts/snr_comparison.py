"""Reconstruction SNR of each sampler against the analytic sinc field."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from _common import METHODS, select
from vcsample import reconstruct, snr_db
from vcsample.evaluation import raster_like
from vcsample.generators import generate_sinc, sinc_radial


@dataclass
class Config:
    n: int = 50000
    count: int = 5000
    resolution: int = 512
    seeds: int = 5
    methods: tuple = ("vc", "random", "kdtree", "poisson")


def run(cfg: Config):
    bounds = [[-5.0, 5.0], [-5.0, 5.0]]
    ref = raster_like(bounds, cfg.resolution)
    ref.values[...] = sinc_radial(np.linalg.norm(ref.cell_centers(), axis=1)).reshape(ref.resolution)
    out = {}
    for method in cfg.methods:
        snrs = []
        for seed in range(cfg.seeds):
            cloud = generate_sinc(cfg.n, seed=seed)
            snrs.append(snr_db(ref, reconstruct(cloud, select(cloud, method, cfg.count, seed), cfg.resolution,
                                              bounds=bounds)))
        out[method] = float(np.median(snrs))
        print(f"{method:<15} median SNR {out[method]:.2f} dB  ({', '.join(f'{s:.2f}' for s in snrs)})")
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--count", type=int, default=Config.count)
    ap.add_argument("--res", type=int, default=Config.resolution)
    ap.add_argument("--seeds", type=int, default=Config.seeds)
    ap.add_argument("--methods", nargs="+", choices=METHODS, default=list(Config.methods))
    a = ap.parse_args()
    run(Config(a.n, a.count, a.res, a.seeds, tuple(a.methods)))
