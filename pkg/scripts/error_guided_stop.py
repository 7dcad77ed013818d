"""Error-guided sampling: where does the running mean error cross a threshold?

Without ``--eps`` the threshold is twice the error of a VC sample of half the
cloud, measured with that sample's kernel size.
"""

from __future__ import annotations

import argparse
import time
import warnings
from dataclasses import dataclass

from _common import write_rows
from vcsample import SamplerConfig, sample, sample_error, scaled_kernel_size
from vcsample.core import default_kernel_size
from vcsample.generators import generate_sinc


@dataclass
class Config:
    n: int = 50000
    eps: float = None
    target_fraction: float = 0.5
    initial_fraction: float = 0.1
    error_batch: int = 32
    out: str = None


def run(cfg: Config):
    warnings.simplefilter("ignore", RuntimeWarning)
    cloud = generate_sinc(cfg.n, seed=1)
    target = int(cfg.target_fraction * cloud.n)
    eps = cfg.eps
    if eps is None:
        half = sample(cloud, SamplerConfig(target))
        h = scaled_kernel_size(default_kernel_size(cloud), cloud.n, target, cloud.d)
        eps = 2.0 * sample_error(cloud, half.indices_by_rank, kernel_size=h).mean
    t = time.perf_counter()
    res = sample(cloud, SamplerConfig(target, initial_fraction=cfg.initial_fraction,
                                      error_batch=cfg.error_batch, error_threshold=eps))
    print(f"eps {eps:.5g}: stopped at {res.count} samples ({100 * res.count / cloud.n:.1f}%), "
          f"threshold reached {res.threshold_reached}, {time.perf_counter() - t:.1f}s")
    if cfg.out:
        write_rows(cfg.out, ("samples", "mean_error"), res.error_history.tolist())
    return res


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--eps", type=float, default=None)
    ap.add_argument("--target-fraction", type=float, default=Config.target_fraction)
    ap.add_argument("--initial-fraction", type=float, default=Config.initial_fraction)
    ap.add_argument("--out", default=None, help="CSV of the running mean error")
    a = ap.parse_args()
    run(Config(a.n, a.eps, a.target_fraction, a.initial_fraction, out=a.out))
