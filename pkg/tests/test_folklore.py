import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from climattn import (
    MotifCatalog,
    SchemaError,
    TermDictionary,
    classify_motif,
    read_catalog,
    score_catalog,
    score_group,
    seed_dictionary,
    tokenize,
    write_scores,
)

DICT = TermDictionary.from_terms(["storm", "flood", "natural disaster", "dust storm"])


# ---------------------------------------------------------------------------
# tokenizing and matching


def test_tokenizer_lowercases_and_strips_punctuation():
    assert tokenize("The STORM; came!") == ["the", "storm", "came"]
    assert tokenize("storm_cloud") == ["storm", "cloud"]  # underscores split
    assert tokenize("a 2nd flood") == ["a", "2nd", "flood"]
    assert tokenize("...") == []


def test_word_match_ignores_case_and_punctuation():
    assert classify_motif("A great STORM destroyed the crops.", DICT)
    assert classify_motif("the flood, they said, never ended", DICT)
    assert not classify_motif("a quiet wedding feast", DICT)
    assert not classify_motif("", DICT)


def test_phrase_match_requires_consecutive_tokens():
    assert classify_motif("after the natural disaster struck", DICT)
    # punctuation and dashes between phrase words do not block the match
    assert classify_motif("after the natural—disaster struck", DICT)
    assert classify_motif("Natural DISASTER!", DICT)
    # interleaved token breaks the phrase
    assert not classify_motif("a natural great disaster", DICT)
    assert not classify_motif("disaster that seemed natural", DICT)


def test_substring_of_a_token_is_not_a_match():
    assert not classify_motif("the stormy brainstorming season", DICT)
    assert classify_motif("a dust storm buried the village", DICT)


def test_dictionary_construction_splits_words_and_phrases():
    d = TermDictionary.from_terms(["Storm", "dust  storm", "", "  "])
    assert d.words == frozenset({"storm"})
    assert d.phrases == (("dust", "storm"),)


def test_dictionary_file_reader_skips_comments(tmp_path):
    path = tmp_path / "terms.txt"
    path.write_text("# header\nstorm\n\n  # note\nnatural disaster\n")
    d = TermDictionary.from_file(path)
    assert d.words == frozenset({"storm"})
    assert d.phrases == (("natural", "disaster"),)


def test_seed_dictionary_is_usable():
    d = seed_dictionary()
    assert "drought" in d.words
    assert ("natural", "disaster") in d.phrases
    assert classify_motif("the year of the Great Drought", d)
    assert not classify_motif("a tale of two brothers", d)


# ---------------------------------------------------------------------------
# scoring


def test_score_group_hand_fractions():
    env, total, score = score_group([True] * 31 + [False] * 31)
    assert (env, total) == (31, 62)
    assert score == pytest.approx(math.log(1.5))
    assert score_group([True, True])[2] == pytest.approx(math.log(2.0))
    assert score_group([False, False, False])[2] == 0.0


def test_score_group_rejects_empty():
    with pytest.raises(ValueError, match="zero motifs"):
        score_group([])


@given(st.lists(st.booleans(), min_size=1, max_size=200))
def test_score_bounds_and_monotonicity(flags):
    env, total, score = score_group(flags)
    assert 0.0 <= score <= math.log(2.0)
    # adding one environmental motif never lowers the score
    env2, total2, score2 = score_group(flags + [True])
    assert score2 >= score or env == total


@given(st.lists(st.booleans(), min_size=1, max_size=50), st.integers(2, 5))
def test_score_invariant_to_duplication(flags, copies):
    assert score_group(flags)[2] == pytest.approx(score_group(flags * copies)[2])


def test_larger_dictionary_never_lowers_scores():
    catalog = MotifCatalog(
        tuple(
            ("g1", f"m{i}", desc)
            for i, desc in enumerate(
                ["a storm at sea", "the frost giant", "a wedding", "the long flood"]
            )
        )
    )
    small = TermDictionary.from_terms(["storm"])
    large = TermDictionary.from_terms(["storm", "flood", "frost"])
    s_small = score_catalog(catalog, small)[0]
    s_large = score_catalog(catalog, large)[0]
    assert s_large.score >= s_small.score
    assert (s_small.env_motifs, s_large.env_motifs) == (1, 3)


def test_score_catalog_sorted_by_group():
    catalog = MotifCatalog(
        (
            ("g2", "m1", "a dry summer drought"),
            ("g1", "m1", "the flood"),
            ("g1", "m2", "a love story"),
        )
    )
    scores = score_catalog(catalog, seed_dictionary())
    assert [s.group_id for s in scores] == ["g1", "g2"]
    assert scores[0].env_motifs == 1 and scores[0].total_motifs == 2
    assert scores[1].score == pytest.approx(math.log(2.0))


def test_catalog_rejects_duplicate_keys():
    with pytest.raises(ValueError, match="duplicate motif key"):
        MotifCatalog((("g1", "m1", "a"), ("g1", "m1", "b")))


# ---------------------------------------------------------------------------
# file round trip


def test_catalog_reader_and_score_writer(tmp_path):
    path = tmp_path / "catalog.csv"
    path.write_text(
        'group_id,motif_id,description\n'
        'g1,m1,"the storm, the flood"\n'
        "g1,m2,a quiet tale\n"
        "g2,m1,drought years\n"
    )
    catalog = read_catalog(path)
    scores = score_catalog(catalog, seed_dictionary())
    out = tmp_path / "scores.csv"
    write_scores(out, scores)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "group_id,env_motifs,total_motifs,score"
    assert lines[1].startswith("g1,1,2,")
    assert float(lines[1].split(",")[3]) == pytest.approx(math.log(1.5))
    assert lines[2].startswith("g2,1,1,")


def test_catalog_reader_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("group_id,description\ng1,a storm\n")
    with pytest.raises(SchemaError, match="motif_id"):
        read_catalog(path)
