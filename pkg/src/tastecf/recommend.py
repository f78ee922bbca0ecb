"""Track scoring, ranking, padding, and the batch recommendation driver.

A track's score for user u is the sum over pruned neighbors v that played
it of w_uv / total_plays(v): each neighbor votes with their similarity,
normalized by how much they listen overall, and every track of a neighbor
counts the same regardless of its own play count.

Lists are truncated to exactly k items, or padded when fewer than k tracks
scored. The default padding appends synthetic dummy ids rendered as "1",
"2", ...; a popularity strategy (most-listened unseen tracks first) is
available. Under-length lists are rare on realistic data, so the dummy
default costs little.

Scores accumulate in the natural-log domain in a fixed order (neighbors in
NeighborSet order, tracks in forward order) and ranking compares those
canonical sums, which makes output byte-identical for any worker count and
for any idf log base.
"""

from dataclasses import dataclass
import math
import multiprocessing
import sys
from typing import Iterable, Iterator, Optional

import numpy as np

from .core import Config, DataError, PAD_POPULARITY
from .similarity import NeighborSet, candidate_neighbors, prune


class ScoredTracks:
    """Positive-score tracks in ascending track order (parallel arrays).

    ln_scores is the natural-log-domain accumulator that ranking decisions
    use; scores converts to the idf table's base (same array for base e).
    """

    __slots__ = ("tracks", "ln_scores", "ln_base")

    def __init__(self, tracks: np.ndarray, ln_scores: np.ndarray,
                 ln_base: float = 1.0):
        self.tracks = tracks
        self.ln_scores = ln_scores
        self.ln_base = ln_base

    @property
    def scores(self) -> np.ndarray:
        return self.ln_scores if self.ln_base == 1.0 else self.ln_scores / self.ln_base

    def as_dict(self) -> dict[int, float]:
        return {int(t): float(s) for t, s in zip(self.tracks, self.scores)}


@dataclass(eq=True)
class Recommendation:
    """Exactly k item slots for one user.

    Entries >= 0 are real track indexes, ordered by (score desc, df desc,
    track asc); a negative entry -p is the p-th dummy pad and only appears
    after every real item. scores parallels the real-item prefix.
    """

    user: int
    items: list[int]
    scores: list[float]

    @property
    def real_items(self) -> list[int]:
        return [t for t in self.items if t >= 0]

    @property
    def pad_count(self) -> int:
        return sum(1 for t in self.items if t < 0)


def score_tracks(index, neighbors: NeighborSet, exclude_seen: bool = True) -> ScoredTracks:
    """Accumulate neighbor votes over the forward lists.

    Tracks the source user already played are omitted when exclude_seen;
    only tracks with a positive score are returned.
    """
    buf = np.zeros(index.n_tracks, dtype=np.float64)
    for v, ln_weight in zip(neighbors.users, neighbors.ln_weights):
        buf[index.forward_tracks(v)] += ln_weight / index.total_plays[v]
    if exclude_seen:
        buf[index.forward_tracks(neighbors.source_user)] = 0.0
    scored = np.flatnonzero(buf > 0.0)
    return ScoredTracks(scored, buf[scored], neighbors.ln_base)


def rank_and_pad(user: int, scored: ScoredTracks, k: int, pad_strategy: str,
                 df: np.ndarray, seen: Optional[np.ndarray] = None) -> Recommendation:
    """Order scored tracks, truncate to k, pad when short.

    Ties break by document frequency descending (popularity prior), then by
    track index ascending. Popularity padding never repeats a listed or
    seen track and falls back to dummy ids when the pool runs dry.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    order = np.lexsort((scored.tracks, -df[scored.tracks], -scored.ln_scores))[:k]
    items = [int(t) for t in scored.tracks[order]]
    scores = [float(s) for s in scored.scores[order]]

    if len(items) < k and pad_strategy == PAD_POPULARITY:
        available = np.ones(df.size, dtype=bool)
        if items:
            available[items] = False
        if seen is not None:
            available[seen] = False
        pool = np.flatnonzero(available)
        pool = pool[np.lexsort((pool, -df[pool]))]
        items.extend(int(t) for t in pool[: k - len(items)])

    pad = 1
    while len(items) < k:
        items.append(-pad)
        pad += 1
    return Recommendation(user, items, scores)


def recommend_one(index, idf, u: int, config: Config) -> Recommendation:
    if not 0 <= u < index.n_users:
        raise DataError(f"user index {u} out of range [0, {index.n_users})")
    neighbors = prune(candidate_neighbors(index, idf, u), config.prune_ratio)
    scored = score_tracks(index, neighbors, config.exclude_seen)
    return rank_and_pad(u, scored, config.k, config.pad_strategy, index.df,
                        seen=index.forward_tracks(u))


# Worker state shared through fork; set in the parent right before the pool
# starts so children inherit it copy-on-write.
_WORKER_STATE = None


def _run_chunk(chunk):
    index, idf, config = _WORKER_STATE
    return [recommend_one(index, idf, u, config) for u in chunk]


def recommend_all(index, idf, users: Iterable[int], config: Config,
                  workers: int = 1) -> Iterator[Recommendation]:
    """One Recommendation per user, in input order.

    Output is identical for every worker count; per-user failures carry the
    offending user index.
    """
    global _WORKER_STATE
    user_list = [int(u) for u in users]
    ctx = None
    if workers > 1 and len(user_list) > 1:
        try:
            ctx = multiprocessing.get_context("fork")
        except ValueError:
            print("fork unavailable; recommending serially", file=sys.stderr)

    if ctx is None:
        for u in user_list:
            yield recommend_one(index, idf, u, config)
        return

    chunk_size = max(1, math.ceil(len(user_list) / (workers * 8)))
    chunks = [user_list[i:i + chunk_size]
              for i in range(0, len(user_list), chunk_size)]
    _WORKER_STATE = (index, idf, config)
    try:
        with ctx.Pool(workers) as pool:
            for batch in pool.imap(_run_chunk, chunks):
                yield from batch
    finally:
        _WORKER_STATE = None


def pad_label(pad_number: int, track_vocab) -> str:
    """Decimal dummy id, '#'-prefixed as needed to dodge real track ids."""
    label = str(pad_number)
    while label in track_vocab:
        label = "#" + label
    return label


def render_recommendation(rec: Recommendation, user_vocab, track_vocab) -> str:
    parts = [user_vocab.lookup(rec.user)]
    for item in rec.items:
        if item >= 0:
            parts.append(track_vocab.lookup(item))
        else:
            parts.append(pad_label(-item, track_vocab))
    return " ".join(parts)


def write_recommendations(recs: Iterable[Recommendation], path,
                          user_vocab, track_vocab) -> None:
    """One line per user: `<user> <track_1> ... <track_k>`."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in recs:
            fh.write(render_recommendation(rec, user_vocab, track_vocab))
            fh.write("\n")
