import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teasercut import llm
from teasercut.errors import ContractViolation, NoFeasibleWindow
from teasercut.extract import (
    KeywordSuggestion,
    MomentQuery,
    OfflineTrendClient,
    extract_moments,
    heuristic_score,
    select_windows,
    suggest_keywords,
)
from teasercut.synth import make_bundle
from teasercut.windows import (
    combine_score,
    duration_closeness,
    keyword_hit_ratio,
    style_lexicon_score,
)

import oracles
from conftest import build_bundle

QUERY_STYLES = ("informational", "curiosity_arousing", "funny", "emotional")


def random_query(rng, lengths=(15, 30, 45)):
    return MomentQuery(
        target_length_s=rng.choice(lengths),
        speakers=rng.choice(("host_only", "guest_only", "both")),
        style=rng.choice(QUERY_STYLES),
        keywords=tuple(rng.sample(["marathon", "training", "sleep", "nutrition", "recovery"],
                                  rng.randint(0, 3))),
    )


class TestMomentQuery:
    def test_defaults(self):
        q = MomentQuery()
        assert (q.target_length_s, q.speakers, q.style) == (30, "both", "informational")
        assert q.keywords == ()

    def test_keyword_normalization(self):
        q = MomentQuery(keywords=(" Marathon", "SLEEP ", ""))
        assert q.keywords == ("marathon", "sleep")

    @pytest.mark.parametrize("bad", [dict(target_length_s=20), dict(speakers="all"),
                                     dict(style="dramatic")])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            MomentQuery(**bad)


class TestSuggestKeywords:
    def test_tie_break_is_lexicographic(self, long_bundle):
        class FixedBackend:
            kind = "mock"

            def complete(self, prompt):
                return "1. alpha\n2. bravo\n3. diet\n4. sleep\n5. echo\n6. foxtrot"

        class FixedTrend:
            def score(self, kw):
                return {"alpha": 5, "bravo": 4, "diet": 3, "sleep": 3, "echo": 2, "foxtrot": 1}[kw]

        got = suggest_keywords(long_bundle, FixedTrend(), FixedBackend())
        assert [s.keyword for s in got] == ["alpha", "bravo", "diet", "sleep", "echo", "foxtrot"]
        assert got[2] == KeywordSuggestion("diet", 3.0)

    def test_offline_fallback_matches_frequency_oracle(self, long_bundle):
        got = suggest_keywords(long_bundle, OfflineTrendClient(long_bundle), llm.MockBackend())
        assert len(got) == 6
        text = long_bundle.text()
        for suggestion in got:
            assert suggestion.trend_score == oracles.term_frequency_scan(text, suggestion.keyword)
        scores = [s.trend_score for s in got]
        assert scores == sorted(scores, reverse=True)
        for a, b in zip(got, got[1:]):
            if a.trend_score == b.trend_score:
                assert a.keyword < b.keyword

    def test_backend_errors_propagate(self, long_bundle):
        class DownBackend:
            kind = "remote"

            def complete(self, prompt):
                raise llm.BackendUnavailable("down")

        from teasercut.errors import BackendUnavailable

        with pytest.raises(BackendUnavailable):
            suggest_keywords(long_bundle, OfflineTrendClient(long_bundle), DownBackend())


class TestHeuristicScore:
    def test_perfect_components_reach_one(self):
        assert combine_score(1.0, 1.0, 1.0, 1.0) == pytest.approx(1.0)
        assert combine_score(0.0, 0.0, 0.0, 0.0) == 0.0

    def test_duration_closeness_endpoints(self):
        assert duration_closeness(30_000, 30_000) == 1.0
        assert duration_closeness(60_000, 30_000) == 0.0
        assert duration_closeness(0, 30_000) == 0.0
        assert duration_closeness(45_000, 30_000) == pytest.approx(0.5)

    def test_keyword_hit_ratio(self):
        tokens = "we ran the marathon and talked about sleep".split()
        assert keyword_hit_ratio(tokens, ()) == 1.0
        assert keyword_hit_ratio(tokens, ("marathon",)) == 1.0
        assert keyword_hit_ratio(tokens, ("marathon", "diet")) == 0.5
        assert keyword_hit_ratio(tokens, ("diet", "stress")) == 0.0

    def test_components_bounded(self, long_bundle):
        rng = random.Random(5)
        for _ in range(30):
            query = random_query(rng)
            lo = rng.randrange(len(long_bundle.sentences) - 3)
            window = (long_bundle.sentences[lo].id, long_bundle.sentences[lo + 2].id)
            score = heuristic_score(long_bundle, window, query)
            assert 0.0 <= score <= 1.0

    @given(
        khr=st.floats(0, 1), style=st.floats(0, 1), close=st.floats(0, 1), live=st.floats(0, 1),
        bump=st.floats(0.01, 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_keyword_monotonicity(self, khr, style, close, live, bump):
        """A window matching strictly more keywords never ranks below one that
        matches fewer, all other components equal."""
        better = min(1.0, khr + bump)
        assert combine_score(better, style, close, live) >= combine_score(khr, style, close, live)

    def test_style_score_counts_lexicon_and_punctuation(self):
        text = "that secret was surprising? nobody knew?"
        tokens = text.replace("?", "").split()
        hot = style_lexicon_score(text, tokens, 0.6, "curiosity_arousing")
        cold = style_lexicon_score("we went for a walk", "we went for a walk".split(),
                                   0.6, "curiosity_arousing")
        assert hot > cold
        assert 0.0 <= hot <= 1.0 and 0.0 <= cold <= 1.0


class TestHeuristicExtraction:
    def test_three_disjoint_consecutive_moments(self, long_bundle):
        result = extract_moments(long_bundle, MomentQuery(), None)
        assert len(result.moments) == 3
        assert result.warning is None
        for a in result.moments:
            assert a.source_backend == "heuristic"
            assert long_bundle.position(a.first_sentence) <= long_bundle.position(a.last_sentence)
        for i, a in enumerate(result.moments):
            for b in result.moments[i + 1 :]:
                assert not a.overlaps(b, long_bundle)

    def test_hard_speaker_filter(self, long_bundle):
        for speakers, role in (("guest_only", "guest"), ("host_only", "host")):
            result = extract_moments(long_bundle, MomentQuery(speakers=speakers), None)
            for m in result.moments:
                for sid in m.sentence_ids(long_bundle):
                    assert long_bundle.sentence_role(sid) == role

    def test_durations_near_target_when_feasible(self, long_bundle):
        rng = random.Random(77)
        for _ in range(25):
            query = random_query(rng)
            if oracles.feasible_disjoint_count(long_bundle, query) >= 3:
                result = extract_moments(long_bundle, query, None)
                for m in result.moments:
                    assert abs(m.duration_ms - query.target_ms) <= 5000, (query, m)

    def test_deterministic(self, long_bundle):
        query = MomentQuery(style="funny", keywords=("marathon",))
        first = extract_moments(long_bundle, query, None)
        second = extract_moments(long_bundle, query, None)
        assert first == second

    def test_single_valid_sentence_yields_warning(self):
        bundle = build_bundle(
            [
                ("h1", [("hello", 0, 500), ("there", 600, 1000)]),
                ("g1", [("thanks", 2000, 2500), ("indeed", 2600, 3200)]),
                ("h1", [("sure", 4000, 4500)]),
            ]
        )
        result = extract_moments(bundle, MomentQuery(speakers="guest_only", target_length_s=15), None)
        assert len(result.moments) == 1
        assert result.warning is not None
        assert result.moments[0].first_sentence == 1

    def test_no_valid_window_raises(self):
        bundle = build_bundle([("h1", [("only", 0, 500), ("hosts", 600, 1100)])])
        with pytest.raises(NoFeasibleWindow):
            extract_moments(bundle, MomentQuery(speakers="guest_only"), None)

    def test_top3_matches_bruteforce_oracle(self, small_bundle):
        rng = random.Random(123)
        for _ in range(20):
            query = random_query(rng, lengths=(15, 30))
            got = [
                (w.first_id, w.last_id, w.duration_ms)
                for w in select_windows(small_bundle, query, count=3)
            ]
            expected = oracles.select_windows_bruteforce(small_bundle, query, count=3)
            assert got == expected, query

    def test_moment_duration_matches_range_duration(self, long_bundle):
        from teasercut.bundle import range_duration

        result = extract_moments(long_bundle, MomentQuery(), None)
        for m in result.moments:
            assert m.duration_ms == range_duration(long_bundle, m.sentence_ids(long_bundle))


class TestLlmExtraction:
    def test_mock_backend_path(self):
        bundle = make_bundle(seed=3, n_sentences=60, long_form=False)
        query = MomentQuery(target_length_s=15)
        result = extract_moments(bundle, query, llm.MockBackend())
        assert len(result.moments) == 3
        assert all(m.source_backend == "llm" for m in result.moments)
        for i, a in enumerate(result.moments):
            for b in result.moments[i + 1 :]:
                assert not a.overlaps(b, bundle)

    def test_retry_then_success(self, long_bundle):
        replies = iter(["garbage", "[1, 2], [2, 3], [4]", "[1, 2], [4, 5], [7]"])
        calls = {"n": 0}

        class FlakyBackend:
            kind = "remote"

            def complete(self, prompt):
                calls["n"] += 1
                return next(replies)

        result = extract_moments(long_bundle, MomentQuery(), FlakyBackend())
        assert calls["n"] == 3
        assert [(m.first_sentence, m.last_sentence) for m in result.moments] == [
            (1, 2), (4, 5), (7, 7)
        ]

    def test_surfaces_error_after_retry_budget(self, long_bundle):
        calls = {"n": 0}

        class BadBackend:
            kind = "remote"

            def complete(self, prompt):
                calls["n"] += 1
                return "[1, 2], [2, 3], [4]"

        with pytest.raises(ContractViolation):
            extract_moments(long_bundle, MomentQuery(), BadBackend())
        assert calls["n"] == 3
