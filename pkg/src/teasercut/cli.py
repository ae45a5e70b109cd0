"""Batch CLI over the same engine the service uses.

Typical offline run:

    teasercut ingest episode_bundle.json --project ./work
    teasercut extract --length 30 --speakers guest --style funny \
        --keywords marathon,training --backend mock --project ./work
    teasercut assemble --sentences 41,42,43 --remove-fillers --project ./work
    teasercut produce --music uplifting --captions rapid --aspect vertical --project ./work
    teasercut export --edl out.json --srt out.srt --render-script render.sh --project ./work

Exit codes: 0 success, 1 validation/usage error, 2 LLM backend failure.
State persists in the --project directory between invocations.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import edl, evaluation, extract, llm, production, review
from .errors import GatewayError, TeasercutError
from .extract import MomentQuery
from .finishing import LogoOverlay
from .project import create_project_dir, load_project_dir, save_project_dir

_SPEAKERS_FLAG = {"host": "host_only", "guest": "guest_only", "both": "both"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 (not argparse's default 2) on bad usage
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="teasercut", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="create a project from a feature bundle")
    p.add_argument("bundle", help="path to the episode feature bundle (JSON)")
    p.add_argument("--project", required=True, help="project directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("extract", help="search candidate moments")
    p.add_argument("--length", type=int, choices=(15, 30, 45), default=30)
    p.add_argument("--speakers", choices=("host", "guest", "both"), default="both")
    p.add_argument("--style", choices=extract.STYLES, default="informational")
    p.add_argument("--keywords", default="", help="comma-separated keywords")
    p.add_argument("--backend", choices=("mock", "llm"), default="mock",
                   help="mock = deterministic heuristic search; llm = prompt-based search")
    p.add_argument("--project", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("assemble", help="set the sentence selection / cut list")
    p.add_argument("--sentences", required=True, help="ordered comma-separated sentence ids")
    p.add_argument("--remove-fillers", action="store_true")
    p.add_argument("--project", required=True)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("produce", help="plan music, captions, and reframe")
    p.add_argument("--music", default="none", choices=(*production.MUSIC_STYLES, "none"))
    p.add_argument("--emphasis", type=int, default=None, help="override the emphasis sentence id")
    p.add_argument("--captions", choices=("standard", "rapid"), default="standard")
    p.add_argument("--aspect", choices=("vertical", "square", "horizontal"), default="vertical")
    p.add_argument("--logo", default=None, help="path to a logo image")
    p.add_argument("--project", required=True)
    p.set_defaults(func=cmd_produce)

    p = sub.add_parser("export", help="write EDL / captions / render script")
    p.add_argument("--edl", default=None)
    p.add_argument("--srt", default=None)
    p.add_argument("--vtt", default=None)
    p.add_argument("--render-script", default=None)
    p.add_argument("--project", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--store", default=None, help="project store directory (default: STORE_DIR env)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("eval", help="score clip annotations and print the accuracy table")
    p.add_argument("--single", required=True, help="single-parameter annotations CSV")
    p.add_argument("--multi", required=True, help="multi-parameter annotations CSV")
    p.add_argument("--out", default=None, help="write the markdown table here (default stdout)")
    p.set_defaults(func=cmd_eval)

    return parser


# --- commands -------------------------------------------------------------------

def cmd_ingest(args) -> int:
    data = Path(args.bundle).read_bytes()
    project = create_project_dir(args.project, data)
    print(f"project {project.id}: {len(project.bundle.sentences)} sentences, "
          f"{project.bundle.duration_ms / 60000:.1f} min, media {project.media_ref}")
    return 0


def _completion_backend(kind: str):
    if kind == "llm":
        return llm.backend_from_env()
    return llm.MockBackend()


def cmd_extract(args) -> int:
    project = load_project_dir(args.project)
    keywords = tuple(k for k in args.keywords.split(",") if k.strip())
    query = MomentQuery(
        target_length_s=args.length,
        speakers=_SPEAKERS_FLAG[args.speakers],
        style=args.style,
        keywords=keywords,
    )
    backend = _completion_backend(args.backend)
    if args.backend == "llm":
        result = extract.extract_moments(project.bundle, query, backend)
    else:
        result = extract.extract_moments(project.bundle, query, None)
    overviews = [review.build_overview(project.bundle, m, query, backend) for m in result.moments]
    project.apply_extract(query, result, overviews)
    save_project_dir(args.project, project)

    print(f"{'#':<3}{'sentences':<12}{'duration':<10}{'speakers':<18}{'live':<6}{'keywords':<20}tagline")
    for i, (moment, card) in enumerate(zip(result.moments, overviews)):
        speakers = ",".join(f"{sid}({role})" for sid, role in sorted(card.speakers_featured.items()))
        contained = ",".join(card.keywords_contained) or "-"
        print(
            f"{i:<3}{f'{moment.first_sentence}-{moment.last_sentence}':<12}"
            f"{moment.duration_ms / 1000:<10.1f}{speakers:<18}"
            f"{card.liveliness_overall:<6.2f}{contained:<20}{card.tagline}"
        )
    if result.warning:
        print(f"warning: {result.warning}", file=sys.stderr)
    return 0


def cmd_assemble(args) -> int:
    project = load_project_dir(args.project)
    try:
        ids = [int(part) for part in args.sentences.split(",") if part.strip()]
    except ValueError:
        print("error: --sentences must be comma-separated integers", file=sys.stderr)
        return 1
    cutlist = project.set_selection(ids, args.remove_fillers)
    save_project_dir(args.project, project)
    cuts = production.detect_jump_cuts(project.bundle, cutlist)
    print(f"cut list: {len(cutlist.segments)} segments, {cutlist.duration_ms() / 1000:.1f}s, "
          f"{len(cuts)} jump cut(s)")
    return 0


def cmd_produce(args) -> int:
    project = load_project_dir(args.project)
    project.set_music(args.music, emphasis_override=args.emphasis)
    logo = LogoOverlay(image_ref=args.logo) if args.logo else None
    project.set_finish(args.aspect, args.captions, logo)
    save_project_dir(args.project, project)
    if project.music_plan is not None:
        print(f"music: {project.music_style}, peak at {project.music_plan.peak_timeline_start / 1000:.1f}s "
              f"(emphasis sentence {project.emphasis.sentence_id})")
    print(f"captions: {len(project.caption_track.cues)} {args.captions} cues; "
          f"reframe: {args.aspect}")
    return 0


def cmd_export(args) -> int:
    targets = {"edl": args.edl, "srt": args.srt, "vtt": args.vtt, "render_script": args.render_script}
    if not any(targets.values()):
        print("error: nothing to export; pass --edl/--srt/--vtt/--render-script", file=sys.stderr)
        return 1
    project = load_project_dir(args.project)
    if args.edl:
        Path(args.edl).write_bytes(edl.export_edl(project))
        print(f"wrote {args.edl}")
    if args.srt:
        if project.caption_track is None:
            print("error: no caption track; run produce first", file=sys.stderr)
            return 1
        Path(args.srt).write_bytes(edl.export_captions(project.caption_track, "srt"))
        print(f"wrote {args.srt}")
    if args.vtt:
        if project.caption_track is None:
            print("error: no caption track; run produce first", file=sys.stderr)
            return 1
        Path(args.vtt).write_bytes(edl.export_captions(project.caption_track, "vtt"))
        print(f"wrote {args.vtt}")
    if args.render_script:
        script = edl.emit_render_script(project)
        Path(args.render_script).write_text(script, encoding="utf-8")
        print(f"wrote {args.render_script}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(store_dir=args.store), host=args.host, port=args.port)
    return 0


def cmd_eval(args) -> int:
    single = evaluation.load_annotations_csv(args.single)
    multi = evaluation.load_annotations_csv(args.multi)
    table = evaluation.accuracy_table(single, multi)
    rendered = table.render_markdown()
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(rendered, end="")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except GatewayError as exc:
        print(f"backend failure: {exc}", file=sys.stderr)
        return 2
    except (TeasercutError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
