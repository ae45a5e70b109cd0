import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teasercut.errors import NotInCutlist, UnsupportedAspect
from teasercut.finishing import (
    generate_captions,
    plan_reframe,
    timeline_remap,
    timeline_unremap,
)
from teasercut.refine import build_cutlist

from conftest import build_bundle


def nine_word_bundle():
    words = [(f"w{i}", i * 500, i * 500 + 400) for i in range(9)]
    return build_bundle([("g1", words)])


class TestCaptions:
    def test_standard_chunking_five_then_four(self):
        bundle = nine_word_bundle()
        cutlist = build_cutlist(bundle, [0])
        track = generate_captions(bundle, cutlist, "standard")
        assert [len(c.text.split()) for c in track.cues] == [5, 4]
        assert track.cues[0].text == "w0 w1 w2 w3 w4"

    def test_rapid_chunking(self):
        bundle = nine_word_bundle()
        cutlist = build_cutlist(bundle, [0])
        track = generate_captions(bundle, cutlist, "rapid")
        assert [len(c.text.split()) for c in track.cues] == [2, 2, 2, 2, 1]

    def test_cue_times_remapped_to_teaser_timeline(self):
        bundle = build_bundle(
            [
                ("g1", [("a", 10_000, 10_400), ("b", 10_500, 11_000)]),
                ("g1", [("c", 40_000, 40_500)]),
            ]
        )
        cutlist = build_cutlist(bundle, [0, 1])
        track = generate_captions(bundle, cutlist, "standard")
        assert (track.cues[0].start_ms, track.cues[0].end_ms) == (0, 1000)
        # second segment starts at teaser ts 1000 (duration of segment one)
        assert (track.cues[1].start_ms, track.cues[1].end_ms) == (1000, 1500)

    def test_chunks_do_not_cross_segment_boundaries(self):
        bundle = build_bundle(
            [
                ("g1", [(f"a{i}", i * 500, i * 500 + 400) for i in range(3)]),
                ("g1", [(f"b{i}", 5000 + i * 500, 5000 + i * 500 + 400) for i in range(3)]),
            ]
        )
        cutlist = build_cutlist(bundle, [0, 1])
        track = generate_captions(bundle, cutlist, "standard")
        assert [c.text for c in track.cues] == ["a0 a1 a2", "b0 b1 b2"]

    def test_concatenation_identity_and_caps_on_random_cutlists(self, long_bundle):
        rng = random.Random(83)
        ids_pool = [s.id for s in long_bundle.sentences]
        for _ in range(100):
            ids = rng.sample(ids_pool, rng.randint(1, 8))
            remove = rng.random() < 0.5
            style = rng.choice(("standard", "rapid"))
            cap = 5 if style == "standard" else 2
            cutlist = build_cutlist(long_bundle, ids, remove)
            track = generate_captions(long_bundle, cutlist, style)
            expected_words = []
            for seg in cutlist.segments:
                expected_words.extend(
                    w.text
                    for w in long_bundle.sentence_words(seg.sentence_id)
                    if w.start >= seg.source_in and w.end <= seg.source_out
                )
            assert " ".join(c.text for c in track.cues) == " ".join(expected_words)
            duration = cutlist.duration_ms()
            prev_end = 0
            for cue in track.cues:
                assert 1 <= len(cue.text.split()) <= cap
                assert 0 <= cue.start_ms <= cue.end_ms <= duration
                assert cue.start_ms >= prev_end
                prev_end = cue.end_ms

    def test_fillers_excluded_when_removed(self):
        bundle = build_bundle(
            [("g1", [("keep", 0, 400), ("um", 500, 800, True), ("this", 900, 1400)])]
        )
        removed = generate_captions(bundle, build_cutlist(bundle, [0], True), "standard")
        assert " ".join(c.text for c in removed.cues) == "keep this"
        kept = generate_captions(bundle, build_cutlist(bundle, [0], False), "standard")
        assert " ".join(c.text for c in kept.cues) == "keep um this"


@st.composite
def random_transcript_cutlist(draw):
    n_sentences = draw(st.integers(1, 5))
    t = 0
    specs = []
    for _ in range(n_sentences):
        n_words = draw(st.integers(1, 12))
        words = []
        for _ in range(n_words):
            dur = draw(st.integers(50, 600))
            gap = draw(st.integers(0, 300))
            filler = draw(st.booleans()) and draw(st.booleans())  # ~25% fillers
            words.append(("w", t, t + dur, filler))
            t += dur + gap
        specs.append(("g1", words))
        t += draw(st.integers(0, 800))
    remove = draw(st.booleans())
    style = draw(st.sampled_from(["standard", "rapid"]))
    order = draw(st.permutations(range(n_sentences)))
    return specs, list(order), remove, style


class TestCaptionProperty:
    @given(random_transcript_cutlist())
    @settings(max_examples=60, deadline=None)
    def test_word_caps_hold_for_random_transcripts(self, case):
        specs, order, remove, style = case
        bundle = build_bundle(specs)
        cutlist = build_cutlist(bundle, order, remove)
        track = generate_captions(bundle, cutlist, style)
        cap = 5 if style == "standard" else 2
        prev_end = 0
        for cue in track.cues:
            assert 1 <= len(cue.text.split()) <= cap
            assert prev_end <= cue.start_ms <= cue.end_ms
            prev_end = cue.end_ms


class TestTimelineRemap:
    def two_segment_cutlist(self):
        bundle = build_bundle(
            [
                ("g1", [("a", 10_000, 12_000), ("b", 12_500, 15_000)]),
                ("g1", [("c", 40_000, 41_000), ("d", 41_200, 43_000)]),
            ]
        )
        return bundle, build_cutlist(bundle, [0, 1])

    def test_offset_into_first_segment(self):
        _, cutlist = self.two_segment_cutlist()
        assert timeline_remap(cutlist, 12_000) == 2_000

    def test_second_segment_starts_after_first(self):
        _, cutlist = self.two_segment_cutlist()
        assert timeline_remap(cutlist, 40_000) == 5_000

    def test_not_in_cutlist(self):
        _, cutlist = self.two_segment_cutlist()
        with pytest.raises(NotInCutlist):
            timeline_remap(cutlist, 20_000)
        with pytest.raises(NotInCutlist):
            timeline_unremap(cutlist, 10_000_000)

    def test_round_trips_1000_random_points(self, long_bundle):
        rng = random.Random(97)
        ids = rng.sample([s.id for s in long_bundle.sentences], 12)
        cutlist = build_cutlist(long_bundle, ids, rng.random() < 0.5)
        total = cutlist.duration_ms()
        for _ in range(1000):
            teaser_ts = rng.randrange(0, total)
            source_ts = timeline_unremap(cutlist, teaser_ts)
            assert timeline_remap(cutlist, source_ts) == teaser_ts
        for _ in range(200):
            seg = cutlist.segments[rng.randrange(len(cutlist.segments))]
            source_ts = rng.randrange(seg.source_in, seg.source_out)
            assert timeline_unremap(cutlist, timeline_remap(cutlist, source_ts)) == source_ts

    def test_strictly_monotone_within_segment(self):
        _, cutlist = self.two_segment_cutlist()
        values = [timeline_remap(cutlist, ts) for ts in range(10_000, 15_000, 500)]
        assert values == sorted(values) and len(set(values)) == len(values)


class TestReframe:
    def test_no_visibility_centers_frame(self):
        bundle = nine_word_bundle()
        cutlist = build_cutlist(bundle, [0])
        plan = plan_reframe(bundle, cutlist, "vertical")
        assert len(plan.keyframes) == 1
        assert plan.keyframes[0].center_x == pytest.approx(0.5)
        assert plan.keyframes[0].center_y == pytest.approx(0.5)

    def test_speaker_box_clamped_inside_frame(self):
        bundle = build_bundle(
            [("g1", [("a", 0, 2000)])],
            visibility=[("g1", 0, 2000, 0.9, 0.5)],
        )
        cutlist = build_cutlist(bundle, [0])
        plan = plan_reframe(bundle, cutlist, "vertical")
        crop_w = plan.crop_width
        assert crop_w == pytest.approx((9 / 16) / (16 / 9), abs=1e-6)
        kf = plan.keyframes[0]
        assert kf.center_x == pytest.approx(1.0 - crop_w / 2, abs=1e-6)
        assert kf.center_x + crop_w / 2 <= 1.0 + 1e-9

    def test_centers_on_speaker_when_available(self):
        bundle = build_bundle(
            [("g1", [("a", 0, 2000)])],
            visibility=[("g1", 0, 2000, 0.6, 0.5), ("h1", 0, 2000, 0.1, 0.5)],
        )
        cutlist = build_cutlist(bundle, [0])
        plan = plan_reframe(bundle, cutlist, "vertical")
        assert plan.keyframes[0].center_x == pytest.approx(0.6)

    def test_horizontal_on_widescreen_source_keeps_full_frame(self):
        bundle = nine_word_bundle()
        plan = plan_reframe(bundle, build_cutlist(bundle, [0]), "horizontal")
        assert plan.crop_width == pytest.approx(1.0)

    def test_unsupported_aspect(self):
        bundle = nine_word_bundle()
        with pytest.raises(UnsupportedAspect):
            plan_reframe(bundle, build_cutlist(bundle, [0]), "horizontal", source_aspect=1.0)

    def test_keyframe_count_equals_segment_count(self, long_bundle):
        rng = random.Random(101)
        ids_pool = [s.id for s in long_bundle.sentences]
        for _ in range(100):
            ids = rng.sample(ids_pool, rng.randint(1, 10))
            cutlist = build_cutlist(long_bundle, ids, rng.random() < 0.5)
            for aspect in ("vertical", "square", "horizontal"):
                plan = plan_reframe(long_bundle, cutlist, aspect)
                assert len(plan.keyframes) == len(cutlist.segments)
                for kf in plan.keyframes:
                    assert plan.crop_width / 2 - 1e-9 <= kf.center_x <= 1 - plan.crop_width / 2 + 1e-9
