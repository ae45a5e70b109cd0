"""Teaser project: persistent session state across the six workflow steps.

A project is one JSON document plus the episode bundle in a per-project
directory. Steps advance along extract -> review -> refine -> transitions ->
music -> finish -> done; going back (re-extracting, re-selecting) resets the
downstream artifacts so nothing stale survives. Every mutation lands in the
audit log exactly once."""

from __future__ import annotations

import datetime as _dt
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from . import production, refine
from .bundle import FeatureBundle, parse_feature_bundle
from .errors import InvalidStepTransition, UnknownProject
from .extract import ExtractionResult, Moment, MomentQuery
from .finishing import CaptionTrack, Cue, LogoOverlay, ReframeKeyframe, ReframePlan
from .production import EmphasisChoice, MusicPlacement, MusicPlan
from .refine import CutList, CutSegment
from .review import MomentOverview

STEPS = ("extract", "review", "refine", "transitions", "music", "finish", "done")


def _now_iso() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


# --- artifact codecs (project.json round-trip) ---------------------------------

def _moment_to_dict(m: Moment) -> dict:
    return {
        "first_sentence": m.first_sentence,
        "last_sentence": m.last_sentence,
        "duration_ms": m.duration_ms,
        "source_backend": m.source_backend,
    }


def _moment_from_dict(d: dict) -> Moment:
    return Moment(
        first_sentence=d["first_sentence"],
        last_sentence=d["last_sentence"],
        duration_ms=d["duration_ms"],
        source_backend=d["source_backend"],
    )


def _overview_to_dict(o: MomentOverview) -> dict:
    return {
        "moment": _moment_to_dict(o.moment),
        "tagline": o.tagline,
        "tagline_degraded": o.tagline_degraded,
        "duration_ms": o.duration_ms,
        "speakers_featured": dict(o.speakers_featured),
        "liveliness_by_speaker": {k: round(v, 6) for k, v in o.liveliness_by_speaker.items()},
        "liveliness_overall": round(o.liveliness_overall, 6),
        "keywords_contained": list(o.keywords_contained),
        "preview": o.preview,
        "full_text": o.full_text,
    }


def _overview_from_dict(d: dict) -> MomentOverview:
    return MomentOverview(
        moment=_moment_from_dict(d["moment"]),
        tagline=d["tagline"],
        tagline_degraded=d["tagline_degraded"],
        duration_ms=d["duration_ms"],
        speakers_featured=dict(d["speakers_featured"]),
        liveliness_by_speaker=dict(d["liveliness_by_speaker"]),
        liveliness_overall=d["liveliness_overall"],
        keywords_contained=tuple(d["keywords_contained"]),
        preview=d["preview"],
        full_text=d["full_text"],
    )


def _cutlist_to_dict(c: CutList) -> dict:
    return {
        "fillers_removed": c.fillers_removed,
        "segments": [
            {
                "sentence_id": s.sentence_id,
                "source_in_ms": s.source_in,
                "source_out_ms": s.source_out,
                "effects": [e.to_dict() for e in s.effects],
            }
            for s in c.segments
        ],
    }


def _cutlist_from_dict(d: dict) -> CutList:
    return CutList(
        fillers_removed=d["fillers_removed"],
        segments=tuple(
            CutSegment(
                sentence_id=s["sentence_id"],
                source_in=s["source_in_ms"],
                source_out=s["source_out_ms"],
                effects=tuple(production.effect_from_dict(e) for e in s["effects"]),
            )
            for s in d["segments"]
        ),
    )


def _music_plan_to_dict(p: MusicPlan) -> dict:
    return {
        "style": p.style,
        "track_id": p.track_id,
        "audio_ref": p.audio_ref,
        "peak_timeline_start_ms": p.peak_timeline_start,
        "placements": [
            {
                "kind": x.kind,
                "source_in_ms": x.source_in,
                "source_out_ms": x.source_out,
                "timeline_start_ms": x.timeline_start,
            }
            for x in p.placements
        ],
    }


def _music_plan_from_dict(d: dict) -> MusicPlan:
    return MusicPlan(
        style=d["style"],
        track_id=d["track_id"],
        audio_ref=d["audio_ref"],
        peak_timeline_start=d["peak_timeline_start_ms"],
        placements=tuple(
            MusicPlacement(
                kind=x["kind"],
                source_in=x["source_in_ms"],
                source_out=x["source_out_ms"],
                timeline_start=x["timeline_start_ms"],
            )
            for x in d["placements"]
        ),
    )


def _captions_to_dict(t: CaptionTrack) -> dict:
    return {
        "style": t.style,
        "cues": [{"start_ms": c.start_ms, "end_ms": c.end_ms, "text": c.text} for c in t.cues],
    }


def _captions_from_dict(d: dict) -> CaptionTrack:
    return CaptionTrack(
        style=d["style"],
        cues=tuple(Cue(start_ms=c["start_ms"], end_ms=c["end_ms"], text=c["text"]) for c in d["cues"]),
    )


def _reframe_to_dict(p: ReframePlan) -> dict:
    return {
        "aspect": p.aspect,
        "crop_width": p.crop_width,
        "crop_height": p.crop_height,
        "keyframes": [
            {"timeline_ms": k.timeline_ms, "center_x": k.center_x, "center_y": k.center_y}
            for k in p.keyframes
        ],
    }


def _reframe_from_dict(d: dict) -> ReframePlan:
    return ReframePlan(
        aspect=d["aspect"],
        crop_width=d["crop_width"],
        crop_height=d["crop_height"],
        keyframes=tuple(
            ReframeKeyframe(timeline_ms=k["timeline_ms"], center_x=k["center_x"], center_y=k["center_y"])
            for k in d["keyframes"]
        ),
    )


def _logo_to_dict(l: LogoOverlay) -> dict:
    return {"image_ref": l.image_ref, "corner": l.corner, "margin_px": l.margin_px, "span": l.span}


def _logo_from_dict(d: dict) -> LogoOverlay:
    return LogoOverlay(
        image_ref=d["image_ref"], corner=d["corner"], margin_px=d["margin_px"], span=d["span"]
    )


def _query_to_dict(q: MomentQuery) -> dict:
    return {
        "target_length_s": q.target_length_s,
        "speakers": q.speakers,
        "style": q.style,
        "keywords": list(q.keywords),
    }


def _query_from_dict(d: dict) -> MomentQuery:
    return MomentQuery(
        target_length_s=d["target_length_s"],
        speakers=d["speakers"],
        style=d["style"],
        keywords=tuple(d["keywords"]),
    )


# --- the project ----------------------------------------------------------------

@dataclass
class TeaserProject:
    id: str
    bundle: FeatureBundle
    step: str = "extract"
    query: MomentQuery | None = None
    candidates: list = field(default_factory=list)          # list[Moment], the paged pool
    overviews: list = field(default_factory=list)           # list[MomentOverview], parallel
    extraction_warning: str | None = None
    selected_index: int | None = None
    selected: Moment | None = None
    ordered_ids: list | None = None
    remove_fillers: bool = False
    cutlist: CutList | None = None
    emphasis: EmphasisChoice | None = None
    music_style: str | None = None
    music_plan: MusicPlan | None = None
    caption_style: str | None = None
    caption_track: CaptionTrack | None = None
    aspect: str | None = None
    reframe_plan: ReframePlan | None = None
    logo: LogoOverlay | None = None
    audit: list = field(default_factory=list)

    @property
    def media_ref(self) -> str:
        return self.bundle.media_ref

    def _record(self, action: str, **detail) -> None:
        self.audit.append(
            {"seq": len(self.audit) + 1, "ts": _now_iso(), "action": action, "detail": detail}
        )

    def _reset_from_selection(self) -> None:
        self.ordered_ids = None
        self.remove_fillers = False
        self.cutlist = None
        self._reset_from_production()

    def _reset_from_production(self) -> None:
        self.emphasis = None
        self.music_style = None
        self.music_plan = None
        self.caption_style = None
        self.caption_track = None
        self.aspect = None
        self.reframe_plan = None
        self.logo = None

    # --- workflow mutations ---

    def apply_extract(self, query: MomentQuery, result: ExtractionResult, overviews, page: int = 0) -> None:
        if page == 0:
            self.query = query
            self.candidates = list(result.moments)
            self.overviews = list(overviews)
            self.extraction_warning = result.warning
            self.selected = None
            self.selected_index = None
            self._reset_from_selection()
            self.step = "review"
        else:
            if not self.candidates or self.query != query:
                raise InvalidStepTransition("show-more requires a prior extract with the same query")
            self.candidates.extend(result.moments)
            self.overviews.extend(overviews)
            self.extraction_warning = result.warning
        self._record("extract", query=_query_to_dict(query), page=page, candidates=len(self.candidates))

    def select_candidate(self, index: int) -> None:
        if not self.candidates:
            raise InvalidStepTransition("no candidates to select from; run extract first")
        if not 0 <= index < len(self.candidates):
            raise ValueError(f"candidate index {index} out of range (have {len(self.candidates)})")
        self.selected_index = index
        self.selected = self.candidates[index]
        self._reset_from_selection()
        self.step = "refine"
        self._record("select", candidate=index)

    def set_selection(self, ordered_ids, remove_fillers: bool) -> CutList:
        cutlist = refine.build_cutlist(self.bundle, ordered_ids, remove_fillers)
        self.ordered_ids = list(ordered_ids)
        self.remove_fillers = remove_fillers
        self.cutlist = cutlist
        self._reset_from_production()
        self.step = "transitions"
        self._record("selection", ordered_ids=list(ordered_ids), remove_fillers=remove_fillers)
        return cutlist

    def _require_cutlist(self) -> CutList:
        if self.cutlist is None or not self.cutlist.segments:
            raise InvalidStepTransition("no selection yet; assemble a cut list first")
        return self.cutlist

    def apply_zoom(self, boundary_index: int, scale: float = production.DEFAULT_ZOOM_SCALE) -> None:
        self.cutlist = production.plan_zoom(self.bundle, self._require_cutlist(), boundary_index, scale)
        self._record("zoom", boundary=boundary_index, scale=scale)

    def apply_reaction(self, boundary_index: int) -> None:
        self.cutlist = production.attach_reaction_shot(self.bundle, self._require_cutlist(), boundary_index)
        self._record("reaction", boundary=boundary_index)

    def remove_transition(self, boundary_index: int, kind: str) -> None:
        self.cutlist = production.remove_effect(self._require_cutlist(), boundary_index, kind)
        self._record("remove_effect", boundary=boundary_index, kind=kind)

    def set_music(self, style: str | None, emphasis_override: int | None = None, backend=None,
                  manifest_path: str | None = None) -> None:
        cutlist = self._require_cutlist()
        if style is None or style == "none":
            self.music_style = None
            self.music_plan = None
            self.emphasis = None
        else:
            tracks = production.load_music_manifest(manifest_path)
            if style not in tracks:
                raise ValueError(f"no music track for style {style!r}")
            if emphasis_override is not None:
                if emphasis_override not in cutlist.sentence_ids():
                    raise ValueError(f"emphasis sentence {emphasis_override} is not in the cut list")
                choice = EmphasisChoice(sentence_id=emphasis_override, source="user")
            else:
                choice = production.detect_emphasis(self.bundle, cutlist, backend)
            first_index = next(
                i for i, seg in enumerate(cutlist.segments) if seg.sentence_id == choice.sentence_id
            )
            emphasis_ts = cutlist.timeline_start_of(first_index)
            self.music_plan = production.lay_music(tracks[style], cutlist.duration_ms(), emphasis_ts)
            self.music_style = style
            self.emphasis = choice
        if self.step in ("transitions", "music"):
            self.step = "finish"
        self._record("music", style=style, emphasis=emphasis_override)

    def set_finish(self, aspect: str, caption_style: str, logo: LogoOverlay | None) -> None:
        from . import finishing

        cutlist = self._require_cutlist()
        self.caption_style = caption_style
        self.caption_track = finishing.generate_captions(self.bundle, cutlist, caption_style)
        self.aspect = aspect
        self.reframe_plan = finishing.plan_reframe(self.bundle, cutlist, aspect)
        self.logo = logo
        self.step = "done"
        self._record("finish", aspect=aspect, caption_style=caption_style, logo=bool(logo))

    # --- serialization ---

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "step": self.step,
            "query": _query_to_dict(self.query) if self.query else None,
            "candidates": [_moment_to_dict(m) for m in self.candidates],
            "overviews": [_overview_to_dict(o) for o in self.overviews],
            "extraction_warning": self.extraction_warning,
            "selected_index": self.selected_index,
            "selected": _moment_to_dict(self.selected) if self.selected else None,
            "ordered_ids": self.ordered_ids,
            "remove_fillers": self.remove_fillers,
            "cutlist": _cutlist_to_dict(self.cutlist) if self.cutlist else None,
            "emphasis": (
                {"sentence_id": self.emphasis.sentence_id, "source": self.emphasis.source,
                 "degraded": self.emphasis.degraded}
                if self.emphasis
                else None
            ),
            "music_style": self.music_style,
            "music_plan": _music_plan_to_dict(self.music_plan) if self.music_plan else None,
            "caption_style": self.caption_style,
            "caption_track": _captions_to_dict(self.caption_track) if self.caption_track else None,
            "aspect": self.aspect,
            "reframe_plan": _reframe_to_dict(self.reframe_plan) if self.reframe_plan else None,
            "logo": _logo_to_dict(self.logo) if self.logo else None,
            "audit": self.audit,
        }

    @classmethod
    def from_dict(cls, bundle: FeatureBundle, data: dict) -> "TeaserProject":
        project = cls(id=data["id"], bundle=bundle)
        project.step = data["step"]
        project.query = _query_from_dict(data["query"]) if data.get("query") else None
        project.candidates = [_moment_from_dict(m) for m in data.get("candidates", [])]
        project.overviews = [_overview_from_dict(o) for o in data.get("overviews", [])]
        project.extraction_warning = data.get("extraction_warning")
        project.selected_index = data.get("selected_index")
        project.selected = _moment_from_dict(data["selected"]) if data.get("selected") else None
        project.ordered_ids = data.get("ordered_ids")
        project.remove_fillers = data.get("remove_fillers", False)
        project.cutlist = _cutlist_from_dict(data["cutlist"]) if data.get("cutlist") else None
        if data.get("emphasis"):
            project.emphasis = EmphasisChoice(
                sentence_id=data["emphasis"]["sentence_id"],
                source=data["emphasis"]["source"],
                degraded=data["emphasis"]["degraded"],
            )
        project.music_style = data.get("music_style")
        project.music_plan = _music_plan_from_dict(data["music_plan"]) if data.get("music_plan") else None
        project.caption_style = data.get("caption_style")
        project.caption_track = (
            _captions_from_dict(data["caption_track"]) if data.get("caption_track") else None
        )
        project.aspect = data.get("aspect")
        project.reframe_plan = _reframe_from_dict(data["reframe_plan"]) if data.get("reframe_plan") else None
        project.logo = _logo_from_dict(data["logo"]) if data.get("logo") else None
        project.audit = list(data.get("audit", []))
        return project


# --- storage ----------------------------------------------------------------------

PROJECT_FILE = "project.json"
BUNDLE_FILE = "bundle.json"


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class ProjectStore:
    """One directory per project under a root; single-writer via per-id locks."""

    def __init__(self, root) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    def _dir(self, project_id: str) -> Path:
        return self.root / project_id

    def exists(self, project_id: str) -> bool:
        return (self._dir(project_id) / PROJECT_FILE).is_file()

    def create(self, bundle_bytes: bytes, project_id: str | None = None) -> TeaserProject:
        bundle = parse_feature_bundle(bundle_bytes)
        project_id = project_id or uuid.uuid4().hex[:12]
        directory = self._dir(project_id)
        directory.mkdir(parents=True, exist_ok=True)
        _write_atomic(directory / BUNDLE_FILE, bundle_bytes)
        project = TeaserProject(id=project_id, bundle=bundle)
        project._record("ingest", media_ref=bundle.media_ref, sentences=len(bundle.sentences))
        self.save(project)
        return project

    def save(self, project: TeaserProject) -> None:
        payload = json.dumps(project.to_dict(), indent=1).encode("utf-8")
        _write_atomic(self._dir(project.id) / PROJECT_FILE, payload)

    def load(self, project_id: str) -> TeaserProject:
        directory = self._dir(project_id)
        project_file = directory / PROJECT_FILE
        if not project_file.is_file():
            raise UnknownProject(f"no project {project_id!r} in store")
        bundle = parse_feature_bundle((directory / BUNDLE_FILE).read_bytes())
        return TeaserProject.from_dict(bundle, json.loads(project_file.read_text(encoding="utf-8")))

    def list_ids(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.name for p in self.root.iterdir() if (p / PROJECT_FILE).is_file())


# --- single-directory access (CLI --project DIR) ------------------------------------

def create_project_dir(directory, bundle_bytes: bytes) -> TeaserProject:
    directory = Path(directory)
    store = ProjectStore(directory.parent if directory.parent != Path("") else Path("."))
    return store.create(bundle_bytes, project_id=directory.name)


def load_project_dir(directory) -> TeaserProject:
    directory = Path(directory)
    project_file = directory / PROJECT_FILE
    if not project_file.is_file():
        raise UnknownProject(f"no project in {directory} (run ingest first)")
    bundle = parse_feature_bundle((directory / BUNDLE_FILE).read_bytes())
    return TeaserProject.from_dict(bundle, json.loads(project_file.read_text(encoding="utf-8")))


def save_project_dir(directory, project: TeaserProject) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(project.to_dict(), indent=1).encode("utf-8")
    _write_atomic(directory / PROJECT_FILE, payload)
