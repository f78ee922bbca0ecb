"""IDF-weighted user-based collaborative filtering over implicit listening
triplets: ingestion, sparse indexing, neighbor pruning, top-k
recommendation, and a MAP@k evaluation harness."""

from .core import (
    AP_CHALLENGE,
    AP_LIST_LENGTH,
    CapacityError,
    ChecksumError,
    Config,
    DataError,
    DuplicatePairError,
    EmptyIndexError,
    FormatVersionError,
    MalformedLineError,
    MissingRecommendationError,
    PAD_DUMMY,
    PAD_POPULARITY,
    Triplet,
    Vocabulary,
)
from .evaluate import (
    EvalReport,
    HistorySplit,
    average_precision,
    mean_average_precision,
    precision_at_k,
    split_history,
)
from .idf import IdfTable, compute_idf
from .index import InteractionIndex, LoadedIndex, build_index, load_index, save_index
from .ingest import TripletBatch, load_dataset, parse_triplets, save_dataset, write_triplets
from .recommend import (
    Recommendation,
    ScoredTracks,
    rank_and_pad,
    recommend_all,
    recommend_one,
    render_recommendation,
    score_tracks,
    write_recommendations,
)
from .similarity import Candidates, NeighborSet, candidate_neighbors, prune, similarity

__version__ = "0.1.0"

__all__ = [
    "AP_CHALLENGE",
    "AP_LIST_LENGTH",
    "CapacityError",
    "Candidates",
    "ChecksumError",
    "Config",
    "DataError",
    "DuplicatePairError",
    "EmptyIndexError",
    "EvalReport",
    "FormatVersionError",
    "HistorySplit",
    "IdfTable",
    "InteractionIndex",
    "LoadedIndex",
    "MalformedLineError",
    "MissingRecommendationError",
    "NeighborSet",
    "PAD_DUMMY",
    "PAD_POPULARITY",
    "Recommendation",
    "ScoredTracks",
    "Triplet",
    "TripletBatch",
    "Vocabulary",
    "average_precision",
    "build_index",
    "candidate_neighbors",
    "compute_idf",
    "load_dataset",
    "load_index",
    "mean_average_precision",
    "parse_triplets",
    "precision_at_k",
    "prune",
    "rank_and_pad",
    "recommend_all",
    "recommend_one",
    "render_recommendation",
    "save_dataset",
    "save_index",
    "score_tracks",
    "similarity",
    "split_history",
    "write_recommendations",
    "write_triplets",
]
