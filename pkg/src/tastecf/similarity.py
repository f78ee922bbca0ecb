"""User-user similarity and neighbor pruning.

Two users' similarity is the sum of idf over the tracks both have played;
play counts do not enter (overlap is binary). Candidates for a user come
from walking the posting lists of their own tracks, which touches exactly
the users with nonempty overlap. Pruning keeps candidates whose weight is
at least prune_ratio times the best candidate weight.

Determinism contract: weights accumulate in the natural-log domain in
ascending track order; retention and ordering decisions compare those
canonical sums, so neighbor sets are bit-reproducible for any worker count
and provably identical for any idf log base. Reported weights are the
canonical sums converted to the table's base.
"""

from dataclasses import dataclass

import numpy as np


_EMPTY_USERS = np.array([], dtype=np.int64)
_EMPTY_WEIGHTS = np.array([], dtype=np.float64)


def _to_base(ln_array: np.ndarray, ln_base: float) -> np.ndarray:
    return ln_array if ln_base == 1.0 else ln_array / ln_base


@dataclass(eq=False)
class Candidates:
    """Users sharing at least one track with source_user, ascending by
    index, with their accumulated idf weights (exact zeros possible when
    every shared track has idf 0)."""

    source_user: int
    users: np.ndarray
    ln_weights: np.ndarray
    ln_base: float = 1.0

    @property
    def weights(self) -> np.ndarray:
        return _to_base(self.ln_weights, self.ln_base)

    def as_dict(self) -> dict[int, float]:
        return {int(u): float(w) for u, w in zip(self.users, self.weights)}

    def __len__(self) -> int:
        return int(self.users.size)


@dataclass(eq=False)
class NeighborSet:
    """Pruned candidates, ordered by (weight desc, user asc).

    w_max is the best candidate weight before pruning (0.0 when the user
    had no candidates at all).
    """

    source_user: int
    users: np.ndarray
    ln_weights: np.ndarray
    ln_w_max: float
    ln_base: float = 1.0

    @property
    def weights(self) -> np.ndarray:
        return _to_base(self.ln_weights, self.ln_base)

    @property
    def w_max(self) -> float:
        return self.ln_w_max / self.ln_base

    def __len__(self) -> int:
        return int(self.users.size)


def similarity(index, idf, u: int, v: int) -> float:
    """Sum of idf over the intersection of the two listening histories."""
    common = np.intersect1d(index.forward_tracks(u), index.forward_tracks(v),
                            assume_unique=True)
    total = 0.0
    for value in idf.ln_values[common].tolist():
        total += value
    return total / idf.ln_base


def candidate_neighbors(index, idf, u: int) -> Candidates:
    """Accumulate idf[t] onto every co-listener of each track t of u.

    Equivalent to computing similarity(u, v) for every v sharing a track
    with u, but in one pass over u's posting lists.
    """
    tracks_u = index.forward_tracks(u)
    if tracks_u.size == 0:
        return Candidates(u, _EMPTY_USERS, _EMPTY_WEIGHTS, idf.ln_base)
    postings = [index.posting(t) for t in tracks_u]
    lengths = [p.size for p in postings]
    co_users = np.concatenate(postings)
    contributions = np.repeat(idf.ln_values[tracks_u], lengths)
    ln_weights = np.bincount(co_users, weights=contributions,
                             minlength=index.n_users)
    shares = np.bincount(co_users, minlength=index.n_users)
    cand = np.flatnonzero(shares)
    cand = cand[cand != u]
    return Candidates(u, cand, ln_weights[cand], idf.ln_base)


def prune(candidates: Candidates, prune_ratio: float) -> NeighborSet:
    """Retain candidates with weight >= prune_ratio * w_max (boundary kept,
    exact zeros dropped) and order them deterministically."""
    if not 0.0 <= prune_ratio <= 1.0:
        raise ValueError(f"prune_ratio must be in [0, 1], got {prune_ratio}")
    ln_weights = candidates.ln_weights
    if ln_weights.size == 0:
        return NeighborSet(candidates.source_user, _EMPTY_USERS,
                           _EMPTY_WEIGHTS, 0.0, candidates.ln_base)
    ln_w_max = float(ln_weights.max())
    keep = (ln_weights > 0.0) & (ln_weights >= prune_ratio * ln_w_max)
    users = candidates.users[keep]
    kept = ln_weights[keep]
    order = np.lexsort((users, -kept))
    return NeighborSet(candidates.source_user, users[order], kept[order],
                       ln_w_max, candidates.ln_base)
