"""Run every sampler once and print a SHA-256 per output as JSON.

Executed in a subprocess by the acceptance suite with different
``VCSAMPLE_THREADS`` settings; the digests must not change.
"""

import hashlib
import json
import warnings

import numpy as np

import vcsample
from vcsample import BaselineSpec, SamplerConfig, run_baseline, sample
from vcsample.error import sample_error
from vcsample.evaluation import reconstruct
from vcsample.generators import generate_sinc, generate_swirl
from vcsample.trajectory import sample_trajectories


def digest(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


def result_digest(r):
    return digest(r.indices_by_rank, r.insertion_density, r.weights)


def main():
    warnings.simplefilter("ignore")
    cloud = generate_sinc(20000, seed=3)
    out = {"threads": vcsample.parallel.get_threads()}
    uni = sample(cloud, SamplerConfig(2000, rng_seed=1))
    out["uniform"] = result_digest(uni)
    out["uniform_small_batches"] = result_digest(sample(cloud, SamplerConfig(2000, rng_seed=1, batch_max=7)))
    out["entropy"] = result_digest(sample(cloud, SamplerConfig(2000, rng_seed=1, mode="entropy")))
    guided = sample(cloud, SamplerConfig(4000, rng_seed=1, error_threshold=0.01))
    out["error_guided"] = digest(guided.indices_by_rank, guided.error_history)
    out["error_field"] = digest(sample_error(cloud, uni.indices_by_rank).per_dim)
    out["reconstruct"] = digest(reconstruct(cloud, uni, 128).values)
    for kind in ("random", "entropy_random", "stratified_kdtree", "poisson_disk"):
        out[kind] = result_digest(run_baseline(cloud, BaselineSpec(kind, rng_seed=4), 2000))
    data = generate_swirl(3000, steps=6, seed=1)
    tr = sample_trajectories(data, SamplerConfig(300, rng_seed=2), eps_t=15)
    out["trajectories"] = digest(tr.segments, tr.exchanges)
    print(json.dumps(out))


if __name__ == "__main__":
    main()
