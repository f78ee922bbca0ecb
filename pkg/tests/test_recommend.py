import io

import numpy as np
import pytest

from tastecf import (
    Config,
    DataError,
    IdfTable,
    build_index,
    candidate_neighbors,
    compute_idf,
    parse_triplets,
    prune,
    rank_and_pad,
    recommend_all,
    recommend_one,
    render_recommendation,
    score_tracks,
)
from tastecf.recommend import ScoredTracks, pad_label
from tastecf.synth import random_batch
from conftest import SCORE_U1_C, SCORE_U3_A, SCORE_U3_B


def _neighbors(index, idf, u, ratio=0.4):
    return prune(candidate_neighbors(index, idf, u), ratio)


def test_empty_neighbor_set_scores_nothing(t1_index, t1_idf):
    lonely = prune(candidate_neighbors(t1_index, t1_idf, 0), 1.0)
    scored = score_tracks(t1_index, _neighbors(t1_index, t1_idf, 2, 1.0))
    assert scored.as_dict()  # u3 has tied neighbors, sanity that they score
    empty_scored = score_tracks(
        t1_index,
        prune(candidate_neighbors(
            build_index(parse_triplets(io.StringIO("u1\ta\t1\n"))),
            IdfTable(np.zeros(1), 1, 2.718281828459045), 0), 0.4))
    assert empty_scored.as_dict() == {}
    assert lonely is not None


def test_t1_u1_scores_single_unseen_track(t1_index, t1_idf):
    scored = score_tracks(t1_index, _neighbors(t1_index, t1_idf, 0))
    got = scored.as_dict()
    assert set(got) == {2}
    assert abs(got[2] - SCORE_U1_C) < 1e-12


def test_t1_u3_scores_accumulate_over_tied_neighbors(t1_index, t1_idf):
    scored = score_tracks(t1_index, _neighbors(t1_index, t1_idf, 2))
    got = scored.as_dict()
    assert set(got) == {0, 1}
    assert abs(got[0] - SCORE_U3_A) < 1e-12
    assert abs(got[1] - SCORE_U3_B) < 1e-12


def test_exclude_seen_omits_history(t1_index, t1_idf):
    for u in range(4):
        scored = score_tracks(t1_index, _neighbors(t1_index, t1_idf, u),
                              exclude_seen=True)
        seen = set(t1_index.forward_tracks(u).tolist())
        assert not seen & set(scored.tracks.tolist())


def test_include_seen_keeps_history_and_tie_breaks_by_df(t1_index, t1_idf):
    # u1's only neighbor votes a, b, c equally; df(b)=df(c)=3 > df(a)=2
    rec = rank_and_pad(0, score_tracks(t1_index, _neighbors(t1_index, t1_idf, 0),
                                       exclude_seen=False),
                       3, "dummy", t1_index.df)
    assert rec.items == [1, 2, 0]


def test_t1_u1_k5_pads_with_dummies(t1_index, t1_idf):
    rec = recommend_one(t1_index, t1_idf, 0, Config(k=5))
    assert rec.items == [2, -1, -2, -3, -4]
    assert len(rec.scores) == 1
    assert abs(rec.scores[0] - SCORE_U1_C) < 1e-12
    assert rec.pad_count == 4
    assert rec.real_items == [2]


def test_truncation_matches_full_sort():
    rng = np.random.default_rng(31)
    tracks = np.arange(600)
    scores = rng.random(600)
    df = rng.integers(1, 50, 600)
    scored = ScoredTracks(tracks, scores)
    rec = rank_and_pad(0, scored, 500, "dummy", df)
    full = sorted(range(600), key=lambda t: (-scores[t], -df[t], t))
    assert rec.items == full[:500]


def test_equal_score_equal_df_breaks_by_lower_index():
    scored = ScoredTracks(np.array([4, 7]), np.array([0.5, 0.5]))
    df = np.array([1, 1, 1, 1, 3, 1, 1, 3])
    rec = rank_and_pad(0, scored, 2, "dummy", df)
    assert rec.items == [4, 7]


def test_popularity_padding_orders_by_df_then_index():
    scored = ScoredTracks(np.array([], dtype=np.int64), np.array([]))
    df = np.array([5, 9, 9, 2])
    rec = rank_and_pad(0, scored, 4, "popularity", df)
    assert rec.items == [1, 2, 0, 3]


def test_popularity_padding_skips_seen_and_falls_back_to_dummies():
    scored = ScoredTracks(np.array([3], dtype=np.int64), np.array([1.0]))
    df = np.array([5, 9, 9, 2])
    rec = rank_and_pad(0, scored, 6, "popularity", df, seen=np.array([1]))
    assert rec.items == [3, 2, 0, -1, -2, -3]


def test_recommend_all_empty_user_list(t1_index, t1_idf):
    assert list(recommend_all(t1_index, t1_idf, [], Config())) == []


def test_recommend_all_preserves_input_order(t1_index, t1_idf):
    users = [3, 0, 2, 1]
    recs = list(recommend_all(t1_index, t1_idf, users, Config(k=3)))
    assert [r.user for r in recs] == users
    assert all(len(r.items) == 3 for r in recs)


def test_recommend_all_t1_matches_oracle_frozen_lists(t1_index, t1_idf):
    recs = list(recommend_all(t1_index, t1_idf, range(4), Config(k=3)))
    assert [r.items for r in recs] == [
        [2, -1, -2], [0, -1, -2], [1, 0, -1], [-1, -2, -3]]


def test_recommend_all_parallel_equals_serial(t1_index, t1_idf):
    config = Config(k=4)
    serial = list(recommend_all(t1_index, t1_idf, range(4), config, workers=1))
    parallel = list(recommend_all(t1_index, t1_idf, range(4), config, workers=2))
    assert serial == parallel


def test_recommend_all_reports_bad_user(t1_index, t1_idf):
    with pytest.raises(DataError, match="99"):
        list(recommend_all(t1_index, t1_idf, [99], Config()))


def test_scaling_idf_by_power_of_two_keeps_sequences():
    rng = np.random.default_rng(32)
    for _ in range(10):
        index = build_index(random_batch(rng))
        idf = compute_idf(index)
        config = Config(k=8)
        baseline = [r.items for r in recommend_all(index, idf, range(index.n_users), config)]
        for alpha in (0.5, 4.0, 1024.0):
            scaled_values = idf.ln_values * alpha
            scaled = IdfTable(scaled_values, idf.n_users, idf.log_base)
            got = [r.items for r in
                   recommend_all(index, scaled, range(index.n_users), config)]
            assert got == baseline


def test_play_count_redistribution_leaves_scores_unchanged(t1_batch):
    index1 = build_index(t1_batch)
    idf1 = compute_idf(index1)
    moved = parse_triplets(io.StringIO(
        "u1\ta\t1\nu1\tb\t2\n"     # u1 total still 3
        "u2\tb\t1\nu2\tc\t3\n"     # u2 total still 4
        "u3\tc\t5\n"
        "u4\ta\t1\nu4\tb\t1\nu4\tc\t1\n"))
    index2 = build_index(moved)
    idf2 = compute_idf(index2)
    for u in range(4):
        s1 = score_tracks(index1, _neighbors(index1, idf1, u)).as_dict()
        s2 = score_tracks(index2, _neighbors(index2, idf2, u)).as_dict()
        assert s1 == s2


def test_pad_label_escapes_collisions(t1_batch):
    vocab = t1_batch.track_vocab
    assert pad_label(1, vocab) == "1"
    vocab.intern("2")
    assert pad_label(2, vocab) == "#2"
    vocab.intern("#3")
    assert pad_label(3, vocab) == "3"


def test_render_recommendation_line(t1_batch, t1_index, t1_idf):
    rec = recommend_one(t1_index, t1_idf, 0, Config(k=5))
    line = render_recommendation(rec, t1_batch.user_vocab, t1_batch.track_vocab)
    assert line == "u1 c 1 2 3 4"
