"""Command-line pipeline: ingest -> build -> recommend -> evaluate, plus
split and stats.

Defaults mirror the reference configuration (prune ratio 0.4, k = 500,
natural-log idf, dummy padding); anything else needs an explicit flag.
Every run prints its full effective configuration to stderr first, so any
output can be reproduced from the log line alone. Path flags may also be
supplied through TASTECF_* environment variables.
"""

import argparse
import math
import multiprocessing
import os
import sys

from .core import (AP_CHALLENGE, AP_LIST_LENGTH, Config, DataError,
                   PAD_DUMMY, PAD_STRATEGIES)
from .evaluate import average_precision, split_history
from .idf import compute_idf
from .index import build_index, load_index, save_index
from .ingest import load_dataset, parse_triplets, save_dataset, write_triplets
from .recommend import recommend_all, render_recommendation

_MODE_NAMES = {"challenge": AP_CHALLENGE, "paper": AP_LIST_LENGTH}


def _log_base(text: str) -> float:
    if text == "e":
        return math.e
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0 or value == 1:
        raise argparse.ArgumentTypeError("log base must be positive and != 1")
    return value


def _ratio(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("must be in [0, 1]")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("must be in (0, 1)")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _delimiter(text: str) -> str:
    return "\t" if text == "\\t" else text


def _add_path(parser, flag: str, env: str, help_text: str, required=True):
    default = os.environ.get(env)
    parser.add_argument(flag, default=default,
                        required=required and default is None,
                        help=f"{help_text} (env {env})")


def _log_config(command: str, args, keys) -> None:
    shown = []
    for key in keys:
        value = getattr(args, key)
        if isinstance(value, float):
            value = repr(value)
        shown.append(f"{key}={value}")
    print(f"config: command={command} " + " ".join(shown), file=sys.stderr)


def _cmd_ingest(args) -> int:
    _log_config("ingest", args, ["input", "out", "delimiter"])
    with open(args.input, "r", encoding="utf-8") as fh:
        batch = parse_triplets(fh, args.delimiter)
    save_dataset(batch, args.out)
    print(f"ingested {len(batch)} triplets "
          f"({len(batch.user_vocab)} users, {len(batch.track_vocab)} tracks) "
          f"-> {args.out}", file=sys.stderr)
    return 0


def _cmd_build(args) -> int:
    _log_config("build", args, ["input", "out", "log_base"])
    batch = load_dataset(args.input)
    index = build_index(batch)
    idf = compute_idf(index, args.log_base)
    save_index(index, batch.user_vocab, batch.track_vocab, args.out, idf=idf)
    print(f"built index: {index.n_users} users, {index.n_tracks} tracks, "
          f"{index.nnz} interactions -> {args.out}", file=sys.stderr)
    return 0


def _cmd_recommend(args) -> int:
    _log_config("recommend", args,
                ["input", "users", "out", "prune_ratio", "k", "log_base",
                 "exclude_seen", "pad", "ap_mode", "seed", "workers"])
    loaded = load_index(args.input)
    idf = loaded.idf
    if idf is None or idf.log_base != args.log_base:
        idf = compute_idf(loaded.index, args.log_base)
    config = Config(prune_ratio=args.prune_ratio, k=args.k,
                    log_base=args.log_base, exclude_seen=args.exclude_seen,
                    pad_strategy=args.pad, ap_mode=_MODE_NAMES[args.ap_mode],
                    seed=args.seed)
    with open(args.users, "r", encoding="utf-8") as fh:
        user_ids = [line.strip() for line in fh if line.strip()]
    indexes = []
    for ext_id in user_ids:
        idx = loaded.user_vocab.get(ext_id)
        if idx is None:
            raise DataError(f"unknown user id {ext_id!r} in {args.users}")
        indexes.append(idx)
    recs = recommend_all(loaded.index, idf, indexes, config, workers=args.workers)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for rec in recs:
            fh.write(render_recommendation(rec, loaded.user_vocab,
                                           loaded.track_vocab))
            fh.write("\n")
    print(f"recommended for {len(indexes)} users -> {args.out}", file=sys.stderr)
    return 0


def _read_recommendation_lines(path):
    rankings = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            user, items = parts[0], parts[1:]
            if user in rankings:
                raise DataError(f"{path}:{line_no}: duplicate recommendation "
                                f"for user {user!r}")
            rankings[user] = items
    return rankings


def _ap_chunk(chunk):
    return [average_precision(ranking, hidden, k, mode)
            for ranking, hidden, k, mode in chunk]


def _cmd_evaluate(args) -> int:
    _log_config("evaluate", args,
                ["recs", "hidden", "k", "mode", "per_user", "workers",
                 "delimiter"])
    rankings = _read_recommendation_lines(args.recs)
    with open(args.hidden, "r", encoding="utf-8") as fh:
        hidden_batch = parse_triplets(fh, args.delimiter)
    hidden_by_user: dict[str, set] = {}
    for triplet in hidden_batch.triplets():
        hidden_by_user.setdefault(triplet.user, set()).add(triplet.track)

    mode = _MODE_NAMES[args.mode]
    users = list(hidden_by_user)
    for user in users:
        if user not in rankings:
            raise DataError(f"no recommendation for evaluated user {user!r}")
    tasks = [(rankings[user], hidden_by_user[user], args.k, mode)
             for user in users]
    ctx = None
    if args.workers > 1 and len(tasks) > 1:
        try:
            ctx = multiprocessing.get_context("fork")
        except ValueError:
            print("fork unavailable; evaluating serially", file=sys.stderr)
    if ctx is not None:
        chunk = max(1, math.ceil(len(tasks) / (args.workers * 8)))
        pieces = [tasks[i:i + chunk] for i in range(0, len(tasks), chunk)]
        with ctx.Pool(args.workers) as pool:
            aps = [ap for piece in pool.imap(_ap_chunk, pieces) for ap in piece]
    else:
        aps = _ap_chunk(tasks)

    map_score = sum(aps) / len(aps) if aps else 0.0
    if args.per_user:
        with open(args.per_user, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("user\tap\thidden_count\n")
            for user, ap in zip(users, aps):
                fh.write(f"{user}\t{ap:.10f}\t{len(hidden_by_user[user])}\n")
    print(f"mAP@{args.k} ({args.mode}) = {map_score:.6f}")
    return 0


def _cmd_split(args) -> int:
    _log_config("split", args,
                ["input", "visible_out", "hidden_out", "fraction", "seed",
                 "delimiter"])
    with open(args.input, "r", encoding="utf-8") as fh:
        batch = parse_triplets(fh, args.delimiter)
    split = split_history(batch, args.fraction, args.seed)
    write_triplets(split.visible, args.visible_out, args.delimiter)
    write_triplets(split.hidden, args.hidden_out, args.delimiter)
    print(f"split {len(batch)} triplets into {len(split.visible)} visible / "
          f"{len(split.hidden)} hidden", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    _log_config("stats", args, ["input", "delimiter"])
    with open(args.input, "rb") as fh:
        magic = fh.read(8)
    if magic == b"TCFDAT1\x00":
        batch = load_dataset(args.input)
    else:
        with open(args.input, "r", encoding="utf-8") as fh:
            batch = parse_triplets(fh, args.delimiter)
    print(f"n_users={len(batch.user_vocab)}")
    print(f"n_tracks={len(batch.track_vocab)}")
    print(f"triplets={len(batch)}")
    print(f"total_plays={int(batch.counts.sum()) if len(batch) else 0}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tastecf",
        description="IDF-weighted user-based collaborative filtering over "
                    "implicit listening triplets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse triplet text into a binary dataset")
    _add_path(p, "--input", "TASTECF_INPUT", "triplet text file")
    _add_path(p, "--out", "TASTECF_OUT", "binary dataset to write")
    p.add_argument("--delimiter", type=_delimiter, default="\t",
                   help="field delimiter (default TAB; \\t accepted)")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("build", help="build the interaction index from a dataset")
    _add_path(p, "--input", "TASTECF_INPUT", "binary dataset file")
    _add_path(p, "--out", "TASTECF_OUT", "binary index to write")
    p.add_argument("--log-base", type=_log_base, default=math.e,
                   metavar="BASE", help="idf log base (default e)")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("recommend", help="write top-k lists for a set of users")
    _add_path(p, "--input", "TASTECF_INPUT", "binary index file")
    _add_path(p, "--users", "TASTECF_USERS", "file with one user id per line")
    _add_path(p, "--out", "TASTECF_OUT", "recommendation file to write")
    p.add_argument("--prune-ratio", type=_ratio, default=0.4,
                   help="keep neighbors scoring at least this fraction of "
                        "the best (default 0.4)")
    p.add_argument("--k", type=_positive_int, default=500,
                   help="recommendation list length (default 500)")
    p.add_argument("--log-base", type=_log_base, default=math.e, metavar="BASE",
                   help="idf log base (default e)")
    p.add_argument("--exclude-seen", action=argparse.BooleanOptionalAction,
                   default=True, help="drop tracks the user already played")
    p.add_argument("--pad", choices=PAD_STRATEGIES, default=PAD_DUMMY,
                   help="how to fill lists shorter than k (default dummy)")
    p.add_argument("--ap-mode", choices=sorted(_MODE_NAMES), default="challenge",
                   help="logged for reproducibility; not used by recommend")
    p.add_argument("--seed", type=int, default=0,
                   help="logged for reproducibility; not used by recommend")
    p.add_argument("--workers", type=_positive_int, default=1,
                   help="parallel workers (output is identical for any N)")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("evaluate", help="score a recommendation file with mAP@k")
    _add_path(p, "--recs", "TASTECF_RECS", "recommendation file")
    _add_path(p, "--hidden", "TASTECF_HIDDEN", "hidden-half triplet text file")
    p.add_argument("--k", type=_positive_int, default=500,
                   help="truncation depth (default 500)")
    p.add_argument("--mode", choices=sorted(_MODE_NAMES), default="challenge",
                   help="AP normalizer: 'challenge' divides by hidden count, "
                        "'paper' by list length")
    _add_path(p, "--per-user", "TASTECF_PER_USER",
              "optional per-user TSV to write", required=False)
    p.add_argument("--delimiter", type=_delimiter, default="\t")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("split", help="split each user's history into "
                                     "visible/hidden triplet files")
    _add_path(p, "--input", "TASTECF_INPUT", "triplet text file")
    _add_path(p, "--visible-out", "TASTECF_VISIBLE_OUT", "visible half to write")
    _add_path(p, "--hidden-out", "TASTECF_HIDDEN_OUT", "hidden half to write")
    p.add_argument("--fraction", type=_fraction, default=0.5,
                   help="visible share of each user's distinct tracks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delimiter", type=_delimiter, default="\t")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("stats", help="print dataset statistics")
    _add_path(p, "--input", "TASTECF_INPUT", "triplet text or binary dataset")
    p.add_argument("--delimiter", type=_delimiter, default="\t")
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
