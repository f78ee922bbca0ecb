"""Per-track inverse document frequency.

idf(t) = log(n_users / df(t)), where df(t) counts the users who played t at
least once. The value is large for rarely played tracks and exactly zero
for tracks everyone has played.

The log base can never change neighbor sets or item rankings (for bases
above 1 all weights scale by one positive constant, and every downstream
comparison is scale-invariant), so the engine accumulates in the
natural-log domain and converts to the configured base only when values
are reported. That keeps rankings bit-identical across bases instead of
merely close. Natural log is the default; bases in (0, 1) flip the sign of
every reported weight and are degenerate for ranking.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .core import EmptyIndexError


@dataclass(eq=False)
class IdfTable:
    """Per-track idf for a fixed user population and log base.

    ln_values holds the natural-log idf the engine computes with; values
    presents the configured base (identical array when the base is e).
    Tracks with df = 0 (possible when a vocabulary is shared with a split
    that put all their plays elsewhere) get an inert 0.0: they appear in no
    posting list, so the value is never read by scoring.
    """

    ln_values: np.ndarray
    n_users: int
    log_base: float
    ln_base: float = field(init=False)
    values: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.log_base == math.e:
            self.ln_base = 1.0
            self.values = self.ln_values
        else:
            self.ln_base = math.log(self.log_base)
            scaled = self.ln_values / self.ln_base
            scaled.flags.writeable = False
            self.values = scaled

    def __eq__(self, other):
        return (
            isinstance(other, IdfTable)
            and self.n_users == other.n_users
            and self.log_base == other.log_base
            and np.array_equal(self.ln_values, other.ln_values)
        )


def compute_idf(index, log_base: float = math.e) -> IdfTable:
    """Build the idf table for every track of the index.

    Raises EmptyIndexError when the index has no users.
    """
    if index.n_users == 0:
        raise EmptyIndexError("cannot compute idf over zero users")
    n = int(index.n_users)
    # scalar math.log, not np.log: keeps values bit-identical to any
    # straight per-entry reimplementation of the formula
    ln_values = np.array(
        [0.0 if d == 0 else math.log(n / d) for d in index.df.tolist()],
        dtype=np.float64,
    )
    ln_values.flags.writeable = False
    return IdfTable(ln_values, n, float(log_base))
