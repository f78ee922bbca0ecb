"""Immutable forward and inverted adjacency over the interaction set.

Both directions are materialized as contiguous offset-array (CSR-style)
storage: the forward side drives scoring, the inverted side drives
candidate generation. Play counts live only on the forward side; posting
lists are bare user indexes, since overlap is binary and per-user play
totals are precomputed.
"""

from dataclasses import dataclass
import struct
from typing import NamedTuple, Optional

import numpy as np

from . import storage
from .core import CapacityError, DataError, DuplicatePairError, MAX_INDEX, Vocabulary
from .idf import IdfTable
from .ingest import TripletBatch

_MAGIC = b"TCFIDX1\x00"
_VERSION = 1


@dataclass(eq=False)
class InteractionIndex:
    """Sparse user-track structure with per-track and per-user aggregates.

    df[t] is the number of distinct listeners of track t (the length of its
    posting list); total_plays[u] is the sum of u's play counts. All arrays
    are frozen after construction and safe to share across workers.
    """

    n_users: int
    n_tracks: int
    fwd_offsets: np.ndarray   # int64, n_users + 1
    fwd_tracks: np.ndarray    # int32, ascending within each user run
    fwd_counts: np.ndarray    # int64, parallel to fwd_tracks
    inv_offsets: np.ndarray   # int64, n_tracks + 1
    inv_users: np.ndarray     # int32, ascending within each track run
    df: np.ndarray            # int64 per track
    total_plays: np.ndarray   # int64 per user

    @property
    def nnz(self) -> int:
        return int(self.fwd_tracks.size)

    def forward_tracks(self, u: int) -> np.ndarray:
        return self.fwd_tracks[self.fwd_offsets[u]:self.fwd_offsets[u + 1]]

    def forward_counts(self, u: int) -> np.ndarray:
        return self.fwd_counts[self.fwd_offsets[u]:self.fwd_offsets[u + 1]]

    def posting(self, t: int) -> np.ndarray:
        return self.inv_users[self.inv_offsets[t]:self.inv_offsets[t + 1]]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InteractionIndex)
            and self.n_users == other.n_users
            and self.n_tracks == other.n_tracks
            and np.array_equal(self.fwd_offsets, other.fwd_offsets)
            and np.array_equal(self.fwd_tracks, other.fwd_tracks)
            and np.array_equal(self.fwd_counts, other.fwd_counts)
            and np.array_equal(self.inv_offsets, other.inv_offsets)
            and np.array_equal(self.inv_users, other.inv_users)
            and np.array_equal(self.total_plays, other.total_plays)
        )


def _freeze(*arrays):
    for arr in arrays:
        if arr.flags.owndata:
            arr.flags.writeable = False


def build_index(batch: TripletBatch) -> InteractionIndex:
    """Build the index; insensitive to the batch's triplet order."""
    n_users = len(batch.user_vocab)
    n_tracks = len(batch.track_vocab)
    if n_users > MAX_INDEX or n_tracks > MAX_INDEX:
        raise CapacityError("id counts exceed the 32-bit index width")

    users = np.asarray(batch.users, dtype=np.int64)
    tracks = np.asarray(batch.tracks, dtype=np.int64)
    counts = np.asarray(batch.counts, dtype=np.int64)
    if users.size:
        if users.min() < 0 or users.max() >= n_users:
            raise DataError("user index outside vocabulary range")
        if tracks.min() < 0 or tracks.max() >= n_tracks:
            raise DataError("track index outside vocabulary range")
        if counts.min() < 1:
            raise DataError("play_count must be >= 1")

    fwd_order = np.lexsort((tracks, users))
    fwd_users = users[fwd_order]
    fwd_tracks = tracks[fwd_order]
    fwd_counts = counts[fwd_order]
    if fwd_users.size > 1:
        dup = (fwd_users[1:] == fwd_users[:-1]) & (fwd_tracks[1:] == fwd_tracks[:-1])
        if dup.any():
            raise DuplicatePairError(None, "duplicate (user, track) pair in batch")

    fwd_offsets = np.zeros(n_users + 1, dtype=np.int64)
    fwd_offsets[1:] = np.cumsum(np.bincount(fwd_users, minlength=n_users))

    inv_order = np.lexsort((users, tracks))
    inv_users = users[inv_order].astype(np.int32)
    inv_offsets = np.zeros(n_tracks + 1, dtype=np.int64)
    inv_offsets[1:] = np.cumsum(np.bincount(tracks[inv_order], minlength=n_tracks))

    # integer-exact while totals stay below 2**53
    total_plays = np.bincount(fwd_users, weights=fwd_counts,
                              minlength=n_users).astype(np.int64)
    df = np.diff(inv_offsets)

    fwd_tracks32 = fwd_tracks.astype(np.int32)
    _freeze(fwd_offsets, fwd_tracks32, fwd_counts, inv_offsets, inv_users,
            df, total_plays)
    return InteractionIndex(n_users, n_tracks, fwd_offsets, fwd_tracks32,
                            fwd_counts, inv_offsets, inv_users, df, total_plays)


class LoadedIndex(NamedTuple):
    index: InteractionIndex
    user_vocab: Vocabulary
    track_vocab: Vocabulary
    idf: Optional[IdfTable]


def save_index(index: InteractionIndex, user_vocab, track_vocab, path,
               idf: Optional[IdfTable] = None) -> None:
    """Persist the index (plus vocabularies and, optionally, an idf table)."""
    chunks = [
        _MAGIC,
        struct.pack("<I", _VERSION),
        struct.pack("<QQQ", index.n_users, index.n_tracks, index.nnz),
        storage.encode_vocab(user_vocab),
        storage.encode_vocab(track_vocab),
        np.ascontiguousarray(index.fwd_offsets, dtype="<u8").tobytes(),
        np.ascontiguousarray(index.fwd_tracks, dtype="<u4").tobytes(),
        np.ascontiguousarray(index.fwd_counts, dtype="<u4").tobytes(),
        np.ascontiguousarray(index.inv_offsets, dtype="<u8").tobytes(),
        np.ascontiguousarray(index.inv_users, dtype="<u4").tobytes(),
        np.ascontiguousarray(index.total_plays, dtype="<u8").tobytes(),
    ]
    if idf is None:
        chunks.append(b"\x00")
    else:
        chunks.append(b"\x01")
        chunks.append(struct.pack("<d", idf.log_base))
        chunks.append(np.ascontiguousarray(idf.ln_values, dtype="<f8").tobytes())
    storage.write_file(path, chunks)


def load_index(path) -> LoadedIndex:
    body = storage.read_verified(path)
    offset = storage.check_header(body, _MAGIC, _VERSION, path)
    n_users, n_tracks, nnz = struct.unpack_from("<QQQ", body, offset)
    offset += 24
    user_vocab, offset = storage.decode_vocab(body, offset, n_users)
    track_vocab, offset = storage.decode_vocab(body, offset, n_tracks)

    def take(dtype, count, out_dtype):
        nonlocal offset
        arr = np.frombuffer(body, dtype=dtype, count=count, offset=offset)
        offset += arr.nbytes
        return arr.astype(out_dtype)

    fwd_offsets = take("<u8", n_users + 1, np.int64)
    fwd_tracks = take("<u4", nnz, np.int32)
    fwd_counts = take("<u4", nnz, np.int64)
    inv_offsets = take("<u8", n_tracks + 1, np.int64)
    inv_users = take("<u4", nnz, np.int32)
    total_plays = take("<u8", n_users, np.int64)
    df = np.diff(inv_offsets)

    idf = None
    if body[offset]:
        offset += 1
        (log_base,) = struct.unpack_from("<d", body, offset)
        offset += 8
        values = np.frombuffer(body, dtype="<f8", count=n_tracks, offset=offset).copy()
        idf = IdfTable(values, int(n_users), log_base)

    _freeze(fwd_offsets, fwd_tracks, fwd_counts, inv_offsets, inv_users,
            df, total_plays)
    index = InteractionIndex(int(n_users), int(n_tracks), fwd_offsets,
                             fwd_tracks, fwd_counts, inv_offsets, inv_users,
                             df, total_plays)
    return LoadedIndex(index, user_vocab, track_vocab, idf)
