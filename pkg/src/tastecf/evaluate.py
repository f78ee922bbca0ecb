"""Ranking metrics (P@k, AP, mAP truncated at k) and the history splitter.

Two AP normalizations exist because truncated mAP is commonly stated two
ways. "challenge" divides the sum of precisions at hit positions by
min(k, number of hidden items), the usual contest scoring; "list_length"
divides by min(k, number of items recommended), so padding a short list
dilutes its AP. Both count the same numerator. Rankings are assumed free
of duplicate real items (repeats are never credited twice).
"""

from dataclasses import dataclass
import math
from typing import Hashable, Mapping, Sequence

import numpy as np

from .core import AP_CHALLENGE, AP_MODES, MissingRecommendationError
from .ingest import TripletBatch


def precision_at_k(ranking: Sequence[Hashable], hidden, k: int) -> float:
    """Fraction of the first k slots that hit the hidden set.

    Pad markers and repeated items count as misses.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    hits = 0
    credited = set()
    for item in ranking[:k]:
        if item in hidden and item not in credited:
            credited.add(item)
            hits += 1
    return hits / k


def average_precision(ranking: Sequence[Hashable], hidden, k: int,
                      ap_mode: str = AP_CHALLENGE) -> float:
    """Sum of P@j over hit positions j <= k, normalized per ap_mode.

    Empty hidden sets score 0 by definition.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if ap_mode not in AP_MODES:
        raise ValueError(f"ap_mode must be one of {AP_MODES}")
    if not hidden:
        return 0.0
    hits = 0
    total = 0.0
    credited = set()
    for position, item in enumerate(ranking[:k], 1):
        if item in hidden and item not in credited:
            credited.add(item)
            hits += 1
            total += hits / position
    if ap_mode == AP_CHALLENGE:
        normalizer = min(k, len(hidden))
    else:
        normalizer = min(k, len(ranking))
    if normalizer == 0:
        return 0.0
    return total / normalizer


@dataclass
class EvalReport:
    """Per-user (user, AP, hidden_count) rows and their unweighted mean."""

    per_user: list[tuple]
    map_score: float
    k: int
    ap_mode: str


def mean_average_precision(rankings: Mapping, hidden_by_user: Mapping,
                           k: int, ap_mode: str = AP_CHALLENGE) -> EvalReport:
    """Average AP over every user with a nonempty hidden set.

    Users with empty hidden sets are not evaluable and are skipped; every
    evaluable user must have a ranking (MissingRecommendationError
    otherwise). Iteration follows hidden_by_user order, so the report is
    deterministic for a deterministic input mapping.
    """
    per_user = []
    total = 0.0
    for user, hidden in hidden_by_user.items():
        if not hidden:
            continue
        if user not in rankings:
            raise MissingRecommendationError(user)
        ap = average_precision(rankings[user], hidden, k, ap_mode)
        per_user.append((user, ap, len(hidden)))
        total += ap
    map_score = total / len(per_user) if per_user else 0.0
    return EvalReport(per_user, map_score, k, ap_mode)


@dataclass(eq=False)
class HistorySplit:
    """Disjoint visible/hidden partition of every user's history.

    Both parts share the original vocabularies, so indexes stay comparable
    across the two batches. Users with fewer than two distinct tracks keep
    everything visible and have no hidden rows (not evaluable).
    """

    visible: TripletBatch
    hidden: TripletBatch
    seed: int

    def hidden_by_user(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {}
        for u, t in zip(self.hidden.users.tolist(), self.hidden.tracks.tolist()):
            out.setdefault(u, set()).add(t)
        return out


def split_history(batch: TripletBatch, fraction: float, seed: int) -> HistorySplit:
    """Per-user random split: floor(fraction * distinct) tracks visible.

    The permutation for user u is drawn from a generator seeded with
    (seed, u), so the split is reproducible and independent of user
    iteration order.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    n_users = len(batch.user_vocab)
    order = np.lexsort((batch.tracks, batch.users))
    sorted_users = batch.users[order]
    offsets = np.zeros(n_users + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(np.bincount(sorted_users, minlength=n_users))

    seed_material = seed & 0xFFFFFFFFFFFFFFFF
    visible_rows = []
    hidden_rows = []
    for u in range(n_users):
        rows = order[offsets[u]:offsets[u + 1]]
        count = rows.size
        if count < 2:
            visible_rows.append(rows)
            continue
        rng = np.random.default_rng([seed_material, u])
        perm = rng.permutation(count)
        n_visible = math.floor(fraction * count)
        visible_rows.append(rows[np.sort(perm[:n_visible])])
        hidden_rows.append(rows[np.sort(perm[n_visible:])])

    def gather(row_groups):
        rows = (np.concatenate(row_groups) if row_groups
                else np.array([], dtype=np.int64))
        return TripletBatch(batch.users[rows], batch.tracks[rows],
                            batch.counts[rows], batch.user_vocab,
                            batch.track_vocab)

    return HistorySplit(gather(visible_rows), gather(hidden_rows), seed)
