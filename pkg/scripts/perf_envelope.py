#!/usr/bin/env python3
"""Scaled performance check: 1M-triplet ingest + build + recommend.

Writes a synthetic popularity-skewed triplet file, then times each phase
and reports peak memory. The acceptance bound is 5 minutes and 2 GiB for
ingest + build + 10k-user recommend on a commodity 4-core desktop.
"""

import argparse
import resource
import tempfile
import time
from pathlib import Path

from tastecf import Config, build_index, compute_idf, parse_triplets, recommend_all
from tastecf.ingest import write_triplets
from tastecf.synth import skewed_batch


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--users", type=int, default=100_000)
    parser.add_argument("--tracks", type=int, default=20_000)
    parser.add_argument("--mean-tracks-per-user", type=float, default=10.5)
    parser.add_argument("--recommend-users", type=int, default=10_000)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=9)
    parser.add_argument("--keep", metavar="PATH",
                        help="also keep the generated triplet file here")
    args = parser.parse_args()

    batch = skewed_batch(args.users, args.tracks, args.mean_tracks_per_user,
                         seed=args.seed)
    print(f"generated {len(batch)} triplets over {len(batch.user_vocab)} users "
          f"and {len(batch.track_vocab)} tracks")

    with tempfile.TemporaryDirectory() as tmp:
        source = Path(args.keep) if args.keep else Path(tmp) / "plays.txt"
        write_triplets(batch, source)

        start = time.time()
        with open(source, encoding="utf-8") as fh:
            parsed = parse_triplets(fh)
        t_ingest = time.time() - start
        print(f"ingest:    {t_ingest:6.1f}s")

        start = time.time()
        index = build_index(parsed)
        idf = compute_idf(index)
        t_build = time.time() - start
        print(f"build:     {t_build:6.1f}s")

        start = time.time()
        n = sum(1 for _ in recommend_all(index, idf,
                                         range(args.recommend_users),
                                         Config(), workers=args.workers))
        t_rec = time.time() - start
        print(f"recommend: {t_rec:6.1f}s ({n} users, {args.workers} worker(s))")

    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    total = t_ingest + t_build + t_rec
    print(f"total:     {total:6.1f}s   peak RSS: {peak:.0f} MiB")


if __name__ == "__main__":
    main()
