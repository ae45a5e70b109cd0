import json
import threading

import pytest
from fastapi.testclient import TestClient

from teasercut import llm
from teasercut.bundle import serialize_feature_bundle
from teasercut.errors import BackendUnavailable
from teasercut.service import create_app


@pytest.fixture()
def store_dir(tmp_path):
    return tmp_path / "store"


@pytest.fixture()
def client(store_dir):
    app = create_app(store_dir=str(store_dir))
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def project_id(client, long_bundle):
    data = serialize_feature_bundle(long_bundle)
    r = client.post("/projects", files={"bundle": ("bundle.json", data, "application/json")})
    assert r.status_code == 201
    return r.json()["id"]


EXTRACT_BODY = {
    "length_s": 30,
    "speakers": "both",
    "style": "informational",
    "keywords": ["marathon"],
    "backend": "mock",
}


def run_to_review(client, project_id):
    r = client.post(f"/projects/{project_id}/extract", json=EXTRACT_BODY)
    assert r.status_code == 200
    return r.json()


def run_to_cutlist(client, project_id, remove_fillers=True):
    payload = run_to_review(client, project_id)
    card = payload["candidates"][0]
    ids = list(range(card["moment"]["first_sentence"], card["moment"]["last_sentence"] + 1))
    assert client.post(f"/projects/{project_id}/select", json={"candidate": 0}).status_code == 200
    r = client.put(
        f"/projects/{project_id}/selection",
        json={"ordered_ids": ids, "remove_fillers": remove_fillers},
    )
    assert r.status_code == 200
    return ids, r.json()


class TestHappyPath:
    def test_full_six_step_flow(self, client, project_id):
        payload = run_to_review(client, project_id)
        assert len(payload["candidates"]) == 3
        for card in payload["candidates"]:
            assert card["tagline"] and card["duration_ms"] > 0
            assert not card["tagline_degraded"]

        ids, echo = run_to_cutlist(client, project_id)
        assert echo["duration_ms"] > 0

        context = client.get(f"/projects/{project_id}/refine/context")
        assert context.status_code == 200
        assert context.json()["core"] == ids

        transitions = client.get(f"/projects/{project_id}/transitions")
        assert transitions.status_code == 200

        music = client.post(f"/projects/{project_id}/music", json={"style": "uplifting"})
        assert music.status_code == 200
        assert music.json()["emphasis"]["sentence_id"] in ids

        finish = client.post(
            f"/projects/{project_id}/finish", json={"aspect": "vertical", "caption_style": "rapid"}
        )
        assert finish.status_code == 200
        assert finish.json()["step"] == "done"

        edl = client.get(f"/projects/{project_id}/export/edl")
        assert edl.status_code == 200 and len(edl.content) > 100
        doc = json.loads(edl.content)
        assert doc["total_duration_ms"] == echo["duration_ms"]

        for fmt in ("srt", "vtt", "render-script"):
            r = client.get(f"/projects/{project_id}/export/{fmt}")
            assert r.status_code == 200 and r.content

    def test_show_more_pages_by_three(self, client, project_id):
        run_to_review(client, project_id)
        page1 = client.post(f"/projects/{project_id}/extract?page=1", json=EXTRACT_BODY)
        assert page1.status_code == 200
        indices = [c["index"] for c in page1.json()["candidates"]]
        assert indices == [3, 4, 5]
        state = client.get(f"/projects/{project_id}").json()
        moments = [
            (c["first_sentence"], c["last_sentence"]) for c in state["candidates"]
        ]
        # pool stays pairwise disjoint across pages
        spans = [set(range(a, b + 1)) for a, b in moments]
        for i, a in enumerate(spans):
            for b in spans[i + 1 :]:
                assert not (a & b)

    def test_keyword_suggestions(self, client, project_id):
        r = client.get(f"/projects/{project_id}/keywords")
        assert r.status_code == 200
        suggestions = r.json()["suggestions"]
        assert len(suggestions) == 6
        scores = [s["trend_score"] for s in suggestions]
        assert scores == sorted(scores, reverse=True)

    def test_transition_effects_round_trip(self, client, long_bundle, store_dir):
        app = create_app(store_dir=str(store_dir))
        with TestClient(app) as c:
            data = serialize_feature_bundle(long_bundle)
            pid = c.post("/projects", files={"bundle": ("b.json", data, "application/json")}).json()["id"]
            run_to_review(c, pid)
            state = c.get(f"/projects/{pid}").json()
            # pick sentences far apart with the same speaker to force a jump cut
            by_speaker = {}
            for s in long_bundle.sentences:
                by_speaker.setdefault(s.speaker_id, []).append(s.id)
            speaker, ids = next((k, v) for k, v in by_speaker.items() if len(v) > 10)
            pick = [ids[0], ids[len(ids) // 2], ids[-1]]
            c.post(f"/projects/{pid}/select", json={"candidate": 0})
            c.put(f"/projects/{pid}/selection", json={"ordered_ids": pick, "remove_fillers": False})
            cuts = c.get(f"/projects/{pid}/transitions").json()["jump_cuts"]
            assert cuts, "expected a jump cut between far-apart same-speaker sentences"
            boundary = cuts[0]["boundary_index"]
            r = c.post(f"/projects/{pid}/transitions/{boundary}/zoom")
            assert r.status_code == 200
            assert any(jc["has_zoom"] for jc in r.json()["jump_cuts"])
            r = c.post(f"/projects/{pid}/transitions/{boundary}/reaction")
            assert r.status_code == 200
            r = c.delete(f"/projects/{pid}/transitions/{boundary}/zoom")
            assert r.status_code == 200
            assert not any(jc["has_zoom"] for jc in r.json()["jump_cuts"])


class TestErrors:
    def test_unknown_project_404(self, client):
        assert client.get("/projects/nope").status_code == 404
        assert client.post("/projects/nope/select", json={"candidate": 0}).status_code == 404

    def test_music_before_selection_409(self, client, project_id):
        r = client.post(f"/projects/{project_id}/music", json={"style": "uplifting"})
        assert r.status_code == 409

    def test_select_without_candidates_409(self, client, project_id):
        r = client.post(f"/projects/{project_id}/select", json={"candidate": 0})
        assert r.status_code == 409

    def test_context_before_select_409(self, client, project_id):
        assert client.get(f"/projects/{project_id}/refine/context").status_code == 409

    def test_show_more_with_different_query_409(self, client, project_id):
        run_to_review(client, project_id)
        other = dict(EXTRACT_BODY, style="funny")
        r = client.post(f"/projects/{project_id}/extract?page=1", json=other)
        assert r.status_code == 409

    def test_duplicate_selection_422(self, client, project_id):
        run_to_review(client, project_id)
        client.post(f"/projects/{project_id}/select", json={"candidate": 0})
        r = client.put(
            f"/projects/{project_id}/selection",
            json={"ordered_ids": [5, 5], "remove_fillers": False},
        )
        assert r.status_code == 422

    def test_unknown_sentence_422(self, client, project_id):
        run_to_review(client, project_id)
        client.post(f"/projects/{project_id}/select", json={"candidate": 0})
        r = client.put(
            f"/projects/{project_id}/selection",
            json={"ordered_ids": [99999], "remove_fillers": False},
        )
        assert r.status_code == 422

    def test_body_validation_422(self, client, project_id):
        r = client.post(f"/projects/{project_id}/extract", json={"length_s": 31})
        assert r.status_code == 422

    def test_zoom_on_non_jump_cut_422(self, client, project_id):
        run_to_cutlist(client, project_id)
        r = client.post(f"/projects/{project_id}/transitions/999/zoom")
        assert r.status_code == 422

    def test_candidate_out_of_range_422(self, client, project_id):
        run_to_review(client, project_id)
        r = client.post(f"/projects/{project_id}/select", json={"candidate": 17})
        assert r.status_code == 422

    def test_llm_failure_502(self, store_dir, long_bundle):
        class DownBackend:
            kind = "remote"

            def complete(self, prompt):
                raise BackendUnavailable("llm is down")

        app = create_app(store_dir=str(store_dir), completion_backend=DownBackend())
        with TestClient(app) as c:
            data = serialize_feature_bundle(long_bundle)
            pid = c.post("/projects", files={"bundle": ("b.json", data, "application/json")}).json()["id"]
            r = c.post(f"/projects/{pid}/extract", json=dict(EXTRACT_BODY, backend="llm"))
            assert r.status_code == 502
            assert "degraded" in r.json()

    def test_tagline_degrades_without_failing_request(self, store_dir, long_bundle):
        class TaglineDownBackend:
            kind = "mock"

            def complete(self, prompt):
                if llm.classify_prompt(prompt) == "tagline":
                    raise BackendUnavailable("tagline model down")
                return llm.MockBackend().complete(prompt)

        app = create_app(store_dir=str(store_dir), completion_backend=TaglineDownBackend())
        with TestClient(app) as c:
            data = serialize_feature_bundle(long_bundle)
            pid = c.post("/projects", files={"bundle": ("b.json", data, "application/json")}).json()["id"]
            r = c.post(f"/projects/{pid}/extract", json=EXTRACT_BODY)
            assert r.status_code == 200
            assert all(card["tagline_degraded"] for card in r.json()["candidates"])


class TestPersistenceAndConcurrency:
    def test_state_survives_restart_with_identical_export(self, store_dir, long_bundle):
        data = serialize_feature_bundle(long_bundle)
        app1 = create_app(store_dir=str(store_dir))
        with TestClient(app1) as c1:
            pid = c1.post("/projects", files={"bundle": ("b.json", data, "application/json")}).json()["id"]
            run_to_review(c1, pid)
            card = c1.get(f"/projects/{pid}").json()["candidates"][0]
            ids = list(range(card["first_sentence"], card["last_sentence"] + 1))
            c1.post(f"/projects/{pid}/select", json={"candidate": 0})
            c1.put(f"/projects/{pid}/selection", json={"ordered_ids": ids, "remove_fillers": True})
            c1.post(f"/projects/{pid}/music", json={"style": "emotional"})
            c1.post(f"/projects/{pid}/finish", json={"aspect": "square", "caption_style": "standard"})
            first = c1.get(f"/projects/{pid}/export/edl").content

        app2 = create_app(store_dir=str(store_dir))  # fresh process-equivalent
        with TestClient(app2) as c2:
            assert c2.get(f"/projects/{pid}").status_code == 200
            second = c2.get(f"/projects/{pid}/export/edl").content
        assert first == second

    def test_audit_log_one_entry_per_mutation(self, client, project_id):
        run_to_cutlist(client, project_id)
        client.post(f"/projects/{project_id}/music", json={"style": "uplifting"})
        client.post(f"/projects/{project_id}/finish", json={"aspect": "vertical", "caption_style": "standard"})
        audit = client.get(f"/projects/{project_id}").json()["audit"]
        actions = [entry["action"] for entry in audit]
        assert actions == ["ingest", "extract", "select", "selection", "music", "finish"]
        assert [entry["seq"] for entry in audit] == list(range(1, len(audit) + 1))

    def test_concurrent_mutations_serialized(self, client, project_id):
        run_to_review(client, project_id)
        client.post(f"/projects/{project_id}/select", json={"candidate": 0})
        card = client.get(f"/projects/{project_id}").json()["candidates"][0]
        ids = list(range(card["first_sentence"], card["last_sentence"] + 1))

        errors = []

        def put_selection(order):
            try:
                r = client.put(
                    f"/projects/{project_id}/selection",
                    json={"ordered_ids": order, "remove_fillers": False},
                )
                assert r.status_code == 200
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        orders = [ids, list(reversed(ids)), ids, list(reversed(ids))]
        threads = [threading.Thread(target=put_selection, args=(o,)) for o in orders]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        state = client.get(f"/projects/{project_id}").json()
        assert state["ordered_ids"] in (ids, list(reversed(ids)))
        selections = [e for e in state["audit"] if e["action"] == "selection"]
        assert len(selections) == 4

    def test_backward_extract_resets_downstream(self, client, project_id):
        run_to_cutlist(client, project_id)
        client.post(f"/projects/{project_id}/music", json={"style": "uplifting"})
        client.post(f"/projects/{project_id}/finish", json={"aspect": "vertical", "caption_style": "rapid"})
        assert client.get(f"/projects/{project_id}").json()["step"] == "done"

        r = client.post(f"/projects/{project_id}/extract", json=dict(EXTRACT_BODY, style="funny"))
        assert r.status_code == 200
        state = client.get(f"/projects/{project_id}").json()
        assert state["step"] == "review"
        assert state["cutlist"] is None
        assert state["music_plan"] is None
        assert state["caption_track"] is None
        assert client.get(f"/projects/{project_id}/export/edl").status_code == 422
