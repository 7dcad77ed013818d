"""Per-step error of VC and random trajectory sampling in the vortex channel."""

from __future__ import annotations

import argparse
import warnings
from dataclasses import dataclass

import numpy as np

from _common import write_rows
from vcsample import SamplerConfig
from vcsample.generators import generate_swirl
from vcsample.trajectory import random_trajectories, sample_trajectories, step_errors


@dataclass
class Config:
    count: int = 10000
    steps: int = 20
    target: int = 1000
    eps_t: int = 100
    seed: int = 0
    random_seeds: int = 3
    out: str = None


def run(cfg: Config):
    warnings.simplefilter("ignore", RuntimeWarning)
    data = generate_swirl(cfg.count, steps=cfg.steps, seed=cfg.seed)
    cols = {}
    for eps_t in sorted({0, cfg.eps_t}):
        res = sample_trajectories(data, SamplerConfig(cfg.target, rng_seed=cfg.seed), eps_t=eps_t)
        cols[f"vc_eps{eps_t}"] = step_errors(data, res)
    for s in range(cfg.random_seeds):
        cols[f"random{s}"] = step_errors(data, random_trajectories(data, cfg.target, seed=s))
    for name, e in cols.items():
        print(f"{name:<12} step 0 {e[0]:.4f}  final {e[-1]:.4f}  ratio {e[-1] / e[0]:.3f}")
    if cfg.out:
        write_rows(cfg.out, ("step", *cols), zip(range(cfg.steps), *cols.values()))
    return cols


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=Config.count)
    ap.add_argument("--steps", type=int, default=Config.steps)
    ap.add_argument("--target", type=int, default=Config.target)
    ap.add_argument("--eps-t", type=int, default=Config.eps_t)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--out", default=None, help="CSV of per-step errors")
    a = ap.parse_args()
    run(Config(a.count, a.steps, a.target, a.eps_t, a.seed, out=a.out))
