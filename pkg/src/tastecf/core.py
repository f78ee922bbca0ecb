"""Shared domain types: dense ID interning, run configuration, errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

# Dense ids are 32-bit; anything larger overflows the binary formats.
MAX_INDEX = 2**31 - 1

PAD_DUMMY = "dummy"
PAD_POPULARITY = "popularity"
PAD_STRATEGIES = (PAD_DUMMY, PAD_POPULARITY)

AP_CHALLENGE = "challenge"
AP_LIST_LENGTH = "list_length"
AP_MODES = (AP_CHALLENGE, AP_LIST_LENGTH)


class DataError(Exception):
    """Base for data-level failures (parsing, file formats, lookups)."""


class MalformedLineError(DataError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicatePairError(DataError):
    def __init__(self, line_no, message: str):
        super().__init__(f"line {line_no}: {message}" if line_no else message)
        self.line_no = line_no


class FormatVersionError(DataError):
    """File magic or format version does not match this build."""


class ChecksumError(DataError):
    """File is truncated or its trailing checksum does not match."""


class CapacityError(DataError):
    """More distinct ids than the 32-bit dense index space supports."""


class EmptyIndexError(DataError):
    """The operation needs an index with at least one user."""


class MissingRecommendationError(DataError):
    def __init__(self, user):
        super().__init__(f"no recommendation for evaluated user {user!r}")
        self.user = user


class Triplet(NamedTuple):
    """One interaction record in external-id form."""

    user: str
    track: str
    play_count: int


class Vocabulary:
    """Bidirectional mapping between external string ids and dense indexes.

    Indexes are assigned in first-seen order and never change; interning a
    known id returns its existing index. External ids are treated as opaque
    strings, nothing about their format is assumed.
    """

    __slots__ = ("_ids", "_index")

    def __init__(self, ids=()):
        self._ids: list[str] = []
        self._index: dict[str, int] = {}
        for ext_id in ids:
            self.intern(ext_id)

    def intern(self, ext_id: str) -> int:
        idx = self._index.get(ext_id)
        if idx is None:
            idx = len(self._ids)
            if idx > MAX_INDEX:
                raise CapacityError("vocabulary exceeds 32-bit index space")
            self._index[ext_id] = idx
            self._ids.append(ext_id)
        return idx

    def lookup(self, index: int) -> str:
        return self._ids[index]

    def index_of(self, ext_id: str) -> int:
        return self._index[ext_id]

    def get(self, ext_id: str, default=None):
        return self._index.get(ext_id, default)

    @property
    def ids(self) -> list[str]:
        """Registered ids in index order. Treat as read-only."""
        return self._ids

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, ext_id) -> bool:
        return ext_id in self._index

    def __iter__(self):
        return iter(self._ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._ids == other._ids

    def __repr__(self) -> str:
        return f"Vocabulary({len(self._ids)} ids)"


@dataclass(frozen=True)
class Config:
    """Run configuration.

    The defaults reproduce the reference setup: prune the neighbor list at
    0.4 of the best candidate weight, emit top-500 lists, weight by
    natural-log idf, skip tracks the user already played, and pad short
    lists with dummy ids.
    """

    prune_ratio: float = 0.4
    k: int = 500
    log_base: float = math.e
    exclude_seen: bool = True
    pad_strategy: str = PAD_DUMMY
    ap_mode: str = AP_CHALLENGE
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.prune_ratio <= 1.0:
            raise ValueError(f"prune_ratio must be in [0, 1], got {self.prune_ratio}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.log_base > 0 or self.log_base == 1:
            raise ValueError(f"log_base must be positive and != 1, got {self.log_base}")
        if self.pad_strategy not in PAD_STRATEGIES:
            raise ValueError(f"pad_strategy must be one of {PAD_STRATEGIES}")
        if self.ap_mode not in AP_MODES:
            raise ValueError(f"ap_mode must be one of {AP_MODES}")
