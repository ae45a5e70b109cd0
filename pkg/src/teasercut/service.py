"""HTTP service exposing the six-step workflow over persistent projects.

One JSON store directory (STORE_DIR), one completion backend (remote when
LLM_ENDPOINT is configured, offline mock otherwise), mutations serialized
per project. The service never touches media; exports are documents."""

from __future__ import annotations

import os
from typing import Literal, Optional

from fastapi import FastAPI, Query, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from . import edl, extract, llm, production, refine, review
from .errors import (
    DuplicateSentence,
    EffectAlreadyPresent,
    EffectNotPresent,
    EmptyInterval,
    EmptyProject,
    EmptyTrack,
    GatewayError,
    IntegrityError,
    InvalidStepTransition,
    MissingAsset,
    NoFeasibleWindow,
    NoReactionAvailable,
    NotAJumpCut,
    NotInCutlist,
    SchemaError,
    UnknownProject,
    UnknownSentence,
    UnsupportedAspect,
)
from .extract import ExtractionResult, Moment, MomentQuery, OfflineTrendClient
from .finishing import LogoOverlay
from .project import ProjectStore, TeaserProject

_422_ERRORS = (
    SchemaError,
    IntegrityError,
    UnknownSentence,
    DuplicateSentence,
    NotAJumpCut,
    EffectAlreadyPresent,
    EffectNotPresent,
    NoReactionAvailable,
    NotInCutlist,
    UnsupportedAspect,
    EmptyProject,
    EmptyTrack,
    EmptyInterval,
    MissingAsset,
    NoFeasibleWindow,
    ValueError,
)


class ExtractRequest(BaseModel):
    length_s: Literal[15, 30, 45] = 30
    speakers: Literal["host_only", "guest_only", "both"] = "both"
    style: Literal["informational", "curiosity_arousing", "funny", "emotional"] = "informational"
    keywords: list[str] = Field(default_factory=list)
    backend: Literal["mock", "llm"] = "mock"


class SelectRequest(BaseModel):
    candidate: int


class SelectionRequest(BaseModel):
    ordered_ids: list[int]
    remove_fillers: bool = False


class MusicRequest(BaseModel):
    style: Literal["inspirational", "emotional", "uplifting", "light_hearted", "none"]
    emphasis_sentence_id: Optional[int] = None


class LogoSpec(BaseModel):
    image_ref: str
    corner: Literal["top_left", "top_right", "bottom_left", "bottom_right"] = "bottom_right"
    margin_px: int = 24
    span: Literal["full", "trailing_card"] = "full"


class FinishRequest(BaseModel):
    aspect: Literal["vertical", "square", "horizontal"] = "vertical"
    caption_style: Literal["standard", "rapid"] = "standard"
    logo: Optional[LogoSpec] = None


def _query_from_request(body: ExtractRequest) -> MomentQuery:
    return MomentQuery(
        target_length_s=body.length_s,
        speakers=body.speakers,
        style=body.style,
        keywords=tuple(body.keywords),
    )


def _candidate_payload(project: TeaserProject, page: int) -> dict:
    lo, hi = page * review.PAGE_SIZE, (page + 1) * review.PAGE_SIZE
    from .project import _overview_to_dict  # same wire shape as the stored state

    cards = []
    for index in range(lo, min(hi, len(project.candidates))):
        cards.append({"index": index, **_overview_to_dict(project.overviews[index])})
    return {
        "page": page,
        "candidates": cards,
        "total_candidates": len(project.candidates),
        "warning": project.extraction_warning,
    }


def _extend_pool(project: TeaserProject, query: MomentQuery, needed_total: int) -> ExtractionResult:
    """Grow the candidate pool with heuristic ranking entries that do not
    overlap anything already offered (used for show-more pages and as the
    continuation of an LLM page-0)."""
    ranking = extract.select_windows(project.bundle, query, count=needed_total + len(project.candidates) + 8)
    fresh: list[Moment] = []
    for w in ranking:
        moment = Moment(
            first_sentence=w.first_id,
            last_sentence=w.last_id,
            duration_ms=w.duration_ms,
            source_backend="heuristic",
        )
        if any(moment.overlaps(existing, project.bundle) for existing in project.candidates):
            continue
        if any(moment.overlaps(other, project.bundle) for other in fresh):
            continue
        fresh.append(moment)
        if len(project.candidates) + len(fresh) >= needed_total:
            break
    warning = None
    if len(project.candidates) + len(fresh) < needed_total:
        warning = "no further disjoint candidates available"
    return ExtractionResult(moments=tuple(fresh), warning=warning)


def create_app(
    store_dir: str | None = None,
    completion_backend=None,
    music_manifest: str | None = None,
) -> FastAPI:
    store = ProjectStore(store_dir or os.environ.get("STORE_DIR", "./teaser_projects"))
    backend = completion_backend if completion_backend is not None else llm.backend_from_env()
    manifest_path = music_manifest or os.environ.get("MUSIC_MANIFEST")

    app = FastAPI(title="teasercut", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["*"],
    )
    app.state.store = store
    app.state.backend = backend

    @app.exception_handler(UnknownProject)
    async def _unknown_project(request: Request, exc: UnknownProject):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(InvalidStepTransition)
    async def _step_error(request: Request, exc: InvalidStepTransition):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(GatewayError)
    async def _gateway_error(request: Request, exc: GatewayError):
        return JSONResponse(
            status_code=502,
            content={"detail": f"LLM backend failure: {exc}", "degraded": False},
        )

    for exc_type in _422_ERRORS:
        @app.exception_handler(exc_type)
        async def _validation_error(request: Request, exc: Exception):
            return JSONResponse(status_code=422, content={"detail": str(exc)})

    # --- project lifecycle ---

    @app.post("/projects", status_code=201)
    async def create_project(bundle: UploadFile):
        data = await bundle.read()
        with store.lock("create"):
            project = store.create(data)
        return {"id": project.id, "media_ref": project.media_ref, "step": project.step}

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return store.load(project_id).to_dict()

    # --- extract / review ---

    @app.post("/projects/{project_id}/extract")
    def extract_candidates(project_id: str, body: ExtractRequest, page: int = Query(0, ge=0)):
        query = _query_from_request(body)
        with store.lock(project_id):
            project = store.load(project_id)
            if page == 0:
                if body.backend == "llm":
                    result = extract.extract_moments(project.bundle, query, backend)
                else:
                    result = extract.extract_moments(project.bundle, query, None)
                overviews = [
                    review.build_overview(project.bundle, m, query, backend) for m in result.moments
                ]
                project.apply_extract(query, result, overviews, page=0)
            else:
                needed_total = (page + 1) * review.PAGE_SIZE
                if len(project.candidates) < needed_total:
                    result = _extend_pool(project, query, needed_total)
                    overviews = [
                        review.build_overview(project.bundle, m, query, backend) for m in result.moments
                    ]
                    project.apply_extract(query, result, overviews, page=page)
            store.save(project)
            return _candidate_payload(project, page)

    @app.get("/projects/{project_id}/keywords")
    def keyword_suggestions(project_id: str):
        project = store.load(project_id)
        suggestions = extract.suggest_keywords(project.bundle, OfflineTrendClient(project.bundle), backend)
        return {"suggestions": [{"keyword": s.keyword, "trend_score": s.trend_score} for s in suggestions]}

    @app.post("/projects/{project_id}/select")
    def select_candidate(project_id: str, body: SelectRequest):
        with store.lock(project_id):
            project = store.load(project_id)
            project.select_candidate(body.candidate)
            store.save(project)
            return {"selected_index": body.candidate, "step": project.step}

    # --- refine ---

    @app.get("/projects/{project_id}/refine/context")
    def refine_context(project_id: str):
        project = store.load(project_id)
        if project.selected is None:
            raise InvalidStepTransition("select a candidate before refining")
        ctx = refine.context_suggestions(project.bundle, project.selected)
        sentences = {
            sid: {
                "id": sid,
                "text": project.bundle.sentence_text(sid),
                "speaker_id": project.bundle.sentence(sid).speaker_id,
                "role": project.bundle.sentence_role(sid),
                "duration_ms": project.bundle.sentence_span(sid)[1] - project.bundle.sentence_span(sid)[0],
            }
            for sid in (*ctx.core, *ctx.before, *ctx.after, *ctx.between,
                        *((ctx.leading_question,) if ctx.leading_question is not None else ()))
        }
        return {
            "core": list(ctx.core),
            "before": list(ctx.before),
            "after": list(ctx.after),
            "leading_question": ctx.leading_question,
            "between": list(ctx.between),
            "sentences": sentences,
        }

    @app.get("/projects/{project_id}/search")
    def search(project_id: str, q: str = ""):
        project = store.load(project_id)
        ids = refine.search_sentences(project.bundle, q)
        return {
            "matches": [
                {"id": sid, "text": project.bundle.sentence_text(sid)} for sid in ids
            ]
        }

    @app.put("/projects/{project_id}/selection")
    def put_selection(project_id: str, body: SelectionRequest):
        with store.lock(project_id):
            project = store.load(project_id)
            cutlist = project.set_selection(body.ordered_ids, body.remove_fillers)
            store.save(project)
            return {
                "duration_ms": cutlist.duration_ms(),
                "fillers_removed": cutlist.fillers_removed,
                "segment_count": len(cutlist.segments),
                "step": project.step,
            }

    # --- transitions ---

    def _transition_state(project: TeaserProject) -> dict:
        cutlist = project.cutlist
        cuts = production.detect_jump_cuts(project.bundle, cutlist)
        payload = []
        for cut in cuts:
            post = cutlist.segments[cut.boundary_index + 1]
            payload.append(
                {
                    "boundary_index": cut.boundary_index,
                    "speaker_id": cut.speaker_id,
                    "has_zoom": any(e.kind == "zoom" for e in post.effects),
                    "has_reaction": any(e.kind == "reaction_shot" for e in post.effects),
                }
            )
        return {"jump_cuts": payload, "segment_count": len(cutlist.segments)}

    @app.get("/projects/{project_id}/transitions")
    def get_transitions(project_id: str):
        project = store.load(project_id)
        if project.cutlist is None:
            raise InvalidStepTransition("no selection yet; assemble a cut list first")
        return _transition_state(project)

    @app.post("/projects/{project_id}/transitions/{boundary}/zoom")
    def add_zoom(project_id: str, boundary: int):
        with store.lock(project_id):
            project = store.load(project_id)
            project.apply_zoom(boundary)
            store.save(project)
            return _transition_state(project)

    @app.post("/projects/{project_id}/transitions/{boundary}/reaction")
    def add_reaction(project_id: str, boundary: int):
        with store.lock(project_id):
            project = store.load(project_id)
            project.apply_reaction(boundary)
            store.save(project)
            return _transition_state(project)

    @app.delete("/projects/{project_id}/transitions/{boundary}/{kind}")
    def delete_transition(project_id: str, boundary: int, kind: Literal["zoom", "reaction"]):
        effect_kind = "reaction_shot" if kind == "reaction" else "zoom"
        with store.lock(project_id):
            project = store.load(project_id)
            project.remove_transition(boundary, effect_kind)
            store.save(project)
            return _transition_state(project)

    # --- music / finish ---

    @app.post("/projects/{project_id}/music")
    def set_music(project_id: str, body: MusicRequest):
        with store.lock(project_id):
            project = store.load(project_id)
            project.set_music(
                body.style,
                emphasis_override=body.emphasis_sentence_id,
                backend=backend,
                manifest_path=manifest_path,
            )
            store.save(project)
            return {
                "style": project.music_style,
                "emphasis": project.to_dict()["emphasis"],
                "music_plan": project.to_dict()["music_plan"],
                "step": project.step,
            }

    @app.post("/projects/{project_id}/finish")
    def set_finish(project_id: str, body: FinishRequest):
        logo = None
        if body.logo is not None:
            logo = LogoOverlay(
                image_ref=body.logo.image_ref,
                corner=body.logo.corner,
                margin_px=body.logo.margin_px,
                span=body.logo.span,
            )
        with store.lock(project_id):
            project = store.load(project_id)
            project.set_finish(body.aspect, body.caption_style, logo)
            store.save(project)
            state = project.to_dict()
            return {
                "aspect": state["aspect"],
                "caption_style": state["caption_style"],
                "caption_cues": len(project.caption_track.cues),
                "step": project.step,
            }

    # --- exports ---

    @app.get("/projects/{project_id}/export/edl")
    def export_edl_doc(project_id: str):
        project = store.load(project_id)
        return Response(content=edl.export_edl(project), media_type="application/json")

    @app.get("/projects/{project_id}/export/srt")
    def export_srt(project_id: str):
        project = store.load(project_id)
        if project.caption_track is None:
            raise InvalidStepTransition("no caption track; run the finish step first")
        return Response(content=edl.export_captions(project.caption_track, "srt"),
                        media_type="application/x-subrip")

    @app.get("/projects/{project_id}/export/vtt")
    def export_vtt(project_id: str):
        project = store.load(project_id)
        if project.caption_track is None:
            raise InvalidStepTransition("no caption track; run the finish step first")
        return Response(content=edl.export_captions(project.caption_track, "vtt"),
                        media_type="text/vtt")

    @app.get("/projects/{project_id}/export/render-script")
    def export_render_script(project_id: str):
        project = store.load(project_id)
        return Response(content=edl.emit_render_script(project), media_type="text/x-shellscript")

    return app


def main() -> None:
    import uvicorn

    bind = os.environ.get("BIND_ADDR", "127.0.0.1:8787")
    host, _, port = bind.partition(":")
    uvicorn.run(create_app(), host=host or "127.0.0.1", port=int(port or 8787))


if __name__ == "__main__":
    main()
