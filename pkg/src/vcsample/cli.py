"""``vcsample`` command-line interface.

Exit codes: 0 success, 1 other library error, 2 invalid input or file,
3 error threshold not reached (the partial result is still written).
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import io
from .baselines import BaselineSpec, run_baseline
from .core import PointCloud, SampleResult, SamplerConfig
from .error import sample_error
from .errors import FormatError, ThresholdNotReached, ValidationError, VCSampleError
from .evaluation import reconstruct, sample_spectrum, snr_db
from .generators import generate_abc, generate_sinc, generate_swirl
from .sampler import sample
from .trajectory import sample_trajectories

_BASELINE_KINDS = {"random": "random", "entropy-random": "entropy_random",
                   "kdtree": "stratified_kdtree", "poisson": "poisson_disk"}


def _write_samples(path, cloud: PointCloud, result: SampleResult) -> None:
    """Selected points in rank order, with ranks 0..k-1."""
    idx = result.indices_by_rank
    io.write_vcsd(path, cloud.subset(idx), ranks=np.arange(len(idx)))


def match_samples(full: PointCloud, samples: PointCloud) -> np.ndarray:
    """Indices into ``full`` of each sample, matched on the exact position bytes."""
    lookup = {}
    for i, row in enumerate(np.ascontiguousarray(full.positions)):
        lookup.setdefault(row.tobytes(), i)
    out = np.empty(samples.n, dtype=np.int64)
    for k, row in enumerate(np.ascontiguousarray(samples.positions)):
        i = lookup.get(row.tobytes())
        if i is None:
            raise ValidationError(f"sample {k} at {row.tolist()} is not a point of the full dataset")
        out[k] = i
    return out


def _save_raster(raster, out, csv_out):
    io.write_vcrg(out, raster)
    if csv_out:
        io.write_raster_csv(csv_out, raster)


def cmd_generate(args) -> int:
    if args.dataset == "sinc":
        cloud = generate_sinc(args.n, seed=args.seed)
        if args.output.lower().endswith(".csv"):
            io.write_csv_cloud(args.output, cloud)
        else:
            io.write_vcsd(args.output, cloud)
        print(f"wrote {cloud.n} points to {args.output}")
        return 0
    if args.dataset == "abc":
        data = generate_abc(args.count, t_span=args.t_span, dt=args.dt, seed=args.seed,
                            record_every=args.record_every)
    else:
        data = generate_swirl(args.count, steps=args.steps, dt=args.dt, seed=args.seed)
    io.write_vctj(args.output, data)
    print(f"wrote {data.n_trajectories} trajectories over {data.n_steps} steps to {args.output}")
    return 0


def _config(args, count) -> SamplerConfig:
    return SamplerConfig(target_count=count, base_kernel_size=args.kernel_size,
                         initial_fraction=args.initial_fraction, histogram_bins=args.bins,
                         batch_max=args.batch_max, rng_seed=args.seed, mode=args.mode,
                         error_threshold=getattr(args, "error_threshold", None))


def cmd_sample(args) -> int:
    cloud = io.read_cloud(args.input)
    count = args.count if args.count is not None else cloud.n
    result = sample(cloud, _config(args, count))
    _write_samples(args.output, cloud, result)
    print(f"selected {result.count} of {cloud.n} points (kernel size {result.kernel_size_used:.6g})")
    if result.error_history is not None:
        print(f"final mean error {result.error_history[-1, 1]:.6g}")
        if not result.threshold_reached:
            raise ThresholdNotReached(
                f"mean error {result.error_history[-1, 1]:.6g} still above "
                f"{args.error_threshold} at {result.count} samples")
    return 0


def cmd_sample_trajectories(args) -> int:
    data = io.read_vctj(args.input)
    res = sample_trajectories(data, _config(args, args.count), eps_t=args.eps_t)
    io.write_segments_csv(args.output, res)
    print(f"{len(res.segments)} segments, {int(res.exchanges.sum())} exchanges, "
          f"{len(res.skipped_steps)} skipped steps")
    return 0


def cmd_baseline(args) -> int:
    cloud = io.read_cloud(args.input)
    params = {} if args.r_min is None else {"r_min": args.r_min}
    spec = BaselineSpec(_BASELINE_KINDS[args.kind], params, args.seed)
    result = run_baseline(cloud, spec, args.count)
    _write_samples(args.output, cloud, result)
    print(f"selected {result.count} of {cloud.n} points ({args.kind})")
    return 0


def cmd_error(args) -> int:
    full = io.read_cloud(args.full)
    samples = io.read_cloud(args.samples)
    idx = match_samples(full, samples)
    field = sample_error(full, idx, kernel_size=args.kernel_size, method=args.method)
    for dim in range(full.m):
        col = field.per_dim[:, dim]
        print(f"v{dim}: mean {col.mean():.10g} max {col.max():.10g}")
    print(f"overall: mean {field.mean:.10g} max {field.max:.10g}")
    if args.per_point:
        io.write_csv_cloud(args.per_point, PointCloud(full.positions, field.per_dim))
    return 0


def cmd_reconstruct(args) -> int:
    full = io.read_cloud(args.full)
    samples = io.read_cloud(args.samples)
    idx = match_samples(full, samples)
    res = SampleResult(idx, np.zeros(len(idx)), np.ones(len(idx)), np.nan)
    raster = reconstruct(full, res, args.res, kernel_size=args.kernel_size, value_dim=args.dim)
    _save_raster(raster, args.output, args.csv)
    if args.reference:
        print(f"SNR {snr_db(io.read_vcrg(args.reference), raster):.4f} dB")
    print(f"wrote {'x'.join(map(str, raster.resolution))} raster to {args.output}")
    return 0


def cmd_spectrum(args) -> int:
    samples = io.read_cloud(args.samples)
    grid, profile = sample_spectrum(samples.positions, args.res)
    _save_raster(grid, args.output, args.csv)
    if args.profile:
        np.savetxt(args.profile, np.column_stack([profile.radius, profile.power, profile.counts]),
                   delimiter=",", header="radius,power,count", comments="", fmt="%.10g")
    print(f"low band {profile.band(0.0, 0.1):.4g}, mid band {profile.band(0.4, 0.6):.4g}")
    return 0


def _sampler_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("uniform", "entropy"), default="uniform")
    p.add_argument("--kernel-size", type=float, default=None, help="base kernel size")
    p.add_argument("--bins", type=int, default=64, help="entropy histogram bins")
    p.add_argument("--batch-max", type=int, default=12288)
    p.add_argument("--initial-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vcsample", description="Void-and-cluster sampling of scattered data.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset")
    gen = p.add_subparsers(dest="dataset", required=True)
    g = gen.add_parser("sinc", help="uniform points in [-5,5]^2 with sinc(|p|)")
    g.add_argument("--n", type=int, default=50000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True, help=".vcsd or .csv")
    g = gen.add_parser("abc", help="ABC-flow pathlines")
    g.add_argument("--count", type=int, default=10000)
    g.add_argument("--t-span", type=float, default=10.0)
    g.add_argument("--dt", type=float, default=0.1)
    g.add_argument("--record-every", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    g = gen.add_parser("swirl", help="pathlines through a vortex channel")
    g.add_argument("--count", type=int, default=10000)
    g.add_argument("--steps", type=int, default=20)
    g.add_argument("--dt", type=float, default=0.1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="void-and-cluster sampling")
    p.add_argument("input")
    p.add_argument("--count", type=int, default=None, help="target sample count (default: all)")
    p.add_argument("--error-threshold", type=float, default=None)
    _sampler_options(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sample-trajectories", help="sample trajectory segments")
    p.add_argument("input")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--eps-t", type=int, default=0)
    _sampler_options(p)
    p.add_argument("-o", "--output", required=True, help="segments CSV")
    p.set_defaults(func=cmd_sample_trajectories)

    p = sub.add_parser("baseline", help="reference samplers")
    p.add_argument("input")
    p.add_argument("--kind", choices=tuple(_BASELINE_KINDS), required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--r-min", type=float, default=None, help="Poisson-disk radius")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("error", help="local Wasserstein error of a sample file")
    p.add_argument("full")
    p.add_argument("samples")
    p.add_argument("--per-point", default=None, help="CSV of per-point errors")
    p.add_argument("--kernel-size", type=float, default=None)
    p.add_argument("--method", choices=("exact", "histogram"), default="exact")
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("reconstruct", help="interpolate samples onto a raster")
    p.add_argument("full")
    p.add_argument("samples")
    p.add_argument("--res", type=int, required=True)
    p.add_argument("--dim", type=int, default=0)
    p.add_argument("--kernel-size", type=float, default=None)
    p.add_argument("--reference", default=None, help="VCRG raster to compute SNR against")
    p.add_argument("--csv", default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("spectrum", help="power spectrum of 2-D sample positions")
    p.add_argument("samples")
    p.add_argument("--res", type=int, required=True)
    p.add_argument("--profile", default=None, help="CSV of the radial profile")
    p.add_argument("--csv", default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_spectrum)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ThresholdNotReached as exc:
        print(f"threshold not reached: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VCSampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
