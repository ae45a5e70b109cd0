"""Scoring arithmetic for the clip-accuracy evaluation.

Reproduces the published scoring rules over clip annotations: duration
within a five-second margin, speaker-set satisfaction, and 7-point relevance
ratings from two raters where a mean of five or higher counts as a match.
The raters themselves (human or LLM-judge) are out of scope; this module is
pure arithmetic over a CSV of annotations.

CSV header:
  clip_id,condition,measured_ms,target_ms,target_speakers,observed_roles,
  style_r1,style_r2,keyword_r1,keyword_r2

condition names the parameter a clip was queried for (duration, speakers,
style, keyword) or "all" for multi-parameter clips. observed_roles is a
|-separated role set, e.g. "guest" or "host|guest".
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .errors import EmptySet, SchemaError

PARAMETERS = ("duration", "speakers", "style", "keyword")
DURATION_MARGIN_MS = 5000
RELEVANCE_THRESHOLD = 5.0
MULTI_SUCCESS_MIN_PARAMS = 3


@dataclass(frozen=True)
class ClipAnnotation:
    clip_id: str
    condition: str  # parameter the clip was queried for, or "all"
    measured_ms: int
    target_ms: int
    target_speakers: str  # host_only | guest_only | both
    observed_roles: frozenset
    style_ratings: tuple[int, int]
    keyword_ratings: tuple[int, int]

    def __post_init__(self) -> None:
        for rating in (*self.style_ratings, *self.keyword_ratings):
            if not 1 <= rating <= 7:
                raise SchemaError(f"clip {self.clip_id}: rating {rating} outside [1, 7]")


def load_annotations_csv(path) -> list[ClipAnnotation]:
    annotations = []
    with open(path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.DictReader(fh)):
            try:
                annotations.append(
                    ClipAnnotation(
                        clip_id=row["clip_id"],
                        condition=row.get("condition", "all") or "all",
                        measured_ms=int(row["measured_ms"]),
                        target_ms=int(row["target_ms"]),
                        target_speakers=row["target_speakers"],
                        observed_roles=frozenset(r for r in row["observed_roles"].split("|") if r),
                        style_ratings=(int(row["style_r1"]), int(row["style_r2"])),
                        keyword_ratings=(int(row["keyword_r1"]), int(row["keyword_r2"])),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise SchemaError(f"annotation row {i + 1}: {exc}") from exc
    return annotations


# --- per-parameter success rules ------------------------------------------------

def duration_success(a: ClipAnnotation, margin_ms: int = DURATION_MARGIN_MS) -> bool:
    return abs(a.measured_ms - a.target_ms) <= margin_ms


def speaker_success(a: ClipAnnotation) -> bool:
    roles = a.observed_roles
    if a.target_speakers == "host_only":
        return bool(roles) and roles <= {"host"}
    if a.target_speakers == "guest_only":
        return bool(roles) and roles <= {"guest"}
    if a.target_speakers == "both":
        return "host" in roles and "guest" in roles
    raise SchemaError(f"clip {a.clip_id}: unknown target_speakers {a.target_speakers!r}")


def relevance_success(a: ClipAnnotation, field: str) -> bool:
    ratings = a.style_ratings if field == "style" else a.keyword_ratings
    return (ratings[0] + ratings[1]) / 2 >= RELEVANCE_THRESHOLD


def _fraction(annotations, predicate) -> float:
    annotations = list(annotations)
    if not annotations:
        raise EmptySet("no annotations to score")
    return sum(1 for a in annotations if predicate(a)) / len(annotations)


def duration_accuracy(annotations, margin_ms: int = DURATION_MARGIN_MS) -> float:
    return _fraction(annotations, lambda a: duration_success(a, margin_ms))


def speaker_accuracy(annotations) -> float:
    return _fraction(annotations, speaker_success)


def relevance_accuracy(annotations, field: str) -> float:
    if field not in ("style", "keyword"):
        raise ValueError("field must be 'style' or 'keyword'")
    return _fraction(annotations, lambda a: relevance_success(a, field))


def parameter_successes(a: ClipAnnotation) -> dict:
    return {
        "duration": duration_success(a),
        "speakers": speaker_success(a),
        "style": relevance_success(a, "style"),
        "keyword": relevance_success(a, "keyword"),
    }


def multi_success_rate(annotations, min_params: int = MULTI_SUCCESS_MIN_PARAMS) -> float:
    """Fraction of clips succeeding on at least min_params parameters."""
    return _fraction(
        annotations,
        lambda a: sum(parameter_successes(a).values()) >= min_params,
    )


# --- the accuracy table -----------------------------------------------------------

def round1(percent: float) -> float:
    """One decimal, ties away from zero (matches the published presentation)."""
    return float(Decimal(repr(percent)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _accuracy_for(annotations, parameter: str) -> float:
    if parameter == "duration":
        return duration_accuracy(annotations)
    if parameter == "speakers":
        return speaker_accuracy(annotations)
    return relevance_accuracy(annotations, parameter)


@dataclass(frozen=True)
class AccuracyTable:
    single: dict  # parameter -> percent (1 decimal)
    multi: dict
    difference: dict
    multi_three_plus_percent: float

    def render_markdown(self) -> str:
        header = "| | " + " | ".join(p.capitalize() for p in PARAMETERS) + " |"
        sep = "|---" * (len(PARAMETERS) + 1) + "|"
        def row(label, values):
            return f"| {label} | " + " | ".join(f"{values[p]:.1f}%" for p in PARAMETERS) + " |"
        lines = [
            header,
            sep,
            row("Single-parameter", self.single),
            row("Multi-parameter", self.multi),
            row("Difference", self.difference),
            "",
            f"Multi-parameter clips succeeding on three or more parameters: "
            f"{self.multi_three_plus_percent:.1f}%",
        ]
        return "\n".join(lines) + "\n"


def accuracy_table(single_annotations, multi_annotations) -> AccuracyTable:
    """Single rows score each clip on the parameter it was queried for
    (its condition); multi rows score every clip on all four parameters."""
    single = {}
    for p in PARAMETERS:
        subset = [a for a in single_annotations if a.condition == p]
        single[p] = round1(100.0 * _accuracy_for(subset, p))
    multi_list = list(multi_annotations)
    multi = {p: round1(100.0 * _accuracy_for(multi_list, p)) for p in PARAMETERS}
    difference = {p: round1(multi[p] - single[p]) for p in PARAMETERS}
    return AccuracyTable(
        single=single,
        multi=multi,
        difference=difference,
        multi_three_plus_percent=round1(100.0 * multi_success_rate(multi_list)),
    )
