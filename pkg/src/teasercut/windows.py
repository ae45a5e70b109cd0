"""Consecutive-sentence window search: enumeration, scoring, selection.

This is the deterministic stand-in for LLM clip ranking. It operates on a
lightweight per-sentence view so the same machinery can run from a full
feature bundle or from a transcript re-parsed out of a prompt (the offline
mock backend does the latter).

Selection policy, in tiers:

  F  windows whose duration is within +/-5 s of the target,
  B  windows within the +/-10 s generation band but outside F,
  R  per-start closest-achievable-duration fallback windows.

Within each tier candidates are ordered by selection score (descending),
then |duration - target| (ascending), then start, then end. Picks must be
pairwise disjoint in sentence range. While picking from F the selection is
feasibility-preserving: a window is skipped if accepting it would make it
impossible to reach min(3, max-disjoint(F)) picks from F. This guarantees
that whenever three disjoint near-target windows exist, all three returned
windows are near-target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .text import count_phrase, tokenize

FEASIBLE_MARGIN_MS = 5_000
GENERATION_BAND_MS = 10_000
BOTH_ROLES_BONUS = 0.05

WEIGHT_KEYWORDS = 0.35
WEIGHT_STYLE = 0.25
WEIGHT_DURATION = 0.25
WEIGHT_LIVELINESS = 0.15


@dataclass(frozen=True)
class WindowSentence:
    """What the window search needs to know about one sentence."""

    id: int
    duration_ms: int
    allowed: bool            # passes the hard speaker filter
    text: str
    tokens: tuple[str, ...]
    role: str | None = None  # "host"/"guest" when known (None in prompt-derived views)
    liveliness: float = 0.5


@dataclass(frozen=True)
class RankedWindow:
    start: int          # position of the first sentence in the view list
    end: int            # position of the last sentence, inclusive
    first_id: int
    last_id: int
    duration_ms: int
    score: float        # pinned component formula, in [0, 1]
    selection_score: float  # score plus the both-roles bonus when applicable


# --- scoring components -------------------------------------------------------

@lru_cache(maxsize=1)
def load_style_lexicons() -> dict:
    with resources.files("teasercut.data").joinpath("style_lexicons.json").open("rb") as fh:
        return json.load(fh)


def duration_closeness(duration_ms: int, target_ms: int) -> float:
    """1.0 at the exact target, linearly down to 0.0 at an offset of one target."""
    return max(0.0, 1.0 - abs(duration_ms - target_ms) / target_ms)


def keyword_hit_ratio(tokens: tuple[str, ...] | list[str], keywords) -> float:
    """Distinct query keywords whole-word-contained in the text / total; 1.0 for no keywords."""
    keywords = list(keywords)
    if not keywords:
        return 1.0
    token_list = list(tokens)
    hit = sum(1 for kw in set(keywords) if count_phrase(token_list, tokenize(kw)) > 0)
    return hit / len(set(keywords))


def style_lexicon_score(text: str, tokens, liveliness: float, style: str) -> float:
    """Lexicon-hit density blended with how close vocal energy sits to the style's sweet spot."""
    lex = load_style_lexicons()[style]
    token_list = list(tokens)
    hits = sum(count_phrase(token_list, tokenize(term)) for term in lex["terms"])
    hits += sum(text.count(mark) for mark in lex["punctuation"])
    lexical = min(1.0, hits / 3.0)
    affinity = 1.0 - min(1.0, abs(liveliness - lex["target_liveliness"]) / 0.5)
    return 0.75 * lexical + 0.25 * affinity


def combine_score(khr: float, style: float, closeness: float, liveliness: float) -> float:
    return (
        WEIGHT_KEYWORDS * khr
        + WEIGHT_STYLE * style
        + WEIGHT_DURATION * closeness
        + WEIGHT_LIVELINESS * liveliness
    )


def score_window(
    text: str,
    tokens,
    duration_ms: int,
    liveliness: float,
    keywords,
    style: str,
    target_ms: int,
) -> float:
    return combine_score(
        keyword_hit_ratio(tokens, keywords),
        style_lexicon_score(text, tokens, liveliness, style),
        duration_closeness(duration_ms, target_ms),
        liveliness,
    )


# --- enumeration --------------------------------------------------------------

def _enumerate(views, target_ms: int, band_ms: int):
    """(banded, fallback) window position triples (start, end, duration).

    banded: all fully-allowed windows with |duration - target| <= band.
    fallback: per start, the allowed window closest to the target duration
    (ties to the shorter window), excluding windows already in banded.
    """
    banded: list[tuple[int, int, int]] = []
    banded_keys: set[tuple[int, int]] = set()
    fallback: list[tuple[int, int, int]] = []
    n = len(views)
    for s in range(n):
        if not views[s].allowed:
            continue
        dur = 0
        best: tuple[int, int, int, int] | None = None  # (diff, width, end, dur)
        for e in range(s, n):
            if not views[e].allowed:
                break
            dur += views[e].duration_ms
            diff = abs(dur - target_ms)
            if diff <= band_ms:
                banded.append((s, e, dur))
                banded_keys.add((s, e))
            if best is None or (diff, e - s) < (best[0], best[1]):
                best = (diff, e - s, e, dur)
            if dur > target_ms + band_ms:
                break
        if best is not None and (s, best[2]) not in banded_keys:
            fallback.append((s, best[2], best[3]))
    return banded, fallback


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def _max_disjoint(intervals: list[tuple[int, int]], blocked: list[tuple[int, int]]) -> int:
    """Maximum number of pairwise-disjoint intervals avoiding the blocked set,
    by the earliest-end greedy."""
    count = 0
    cursor = -1
    for s, e in sorted(intervals, key=lambda iv: iv[1]):
        if s <= cursor:
            continue
        if any(_overlaps((s, e), b) for b in blocked):
            continue
        count += 1
        cursor = e
    return count


def rank_and_select(
    views,
    target_ms: int,
    keywords,
    style: str,
    count: int = 3,
    liveliness_fn=None,
    both_roles_bonus: bool = False,
) -> list[RankedWindow]:
    """Select up to `count` pairwise-disjoint windows under the tiered policy.

    liveliness_fn(start_pos, end_pos) supplies window vocal energy in [0, 1];
    when None, per-sentence view liveliness is duration-averaged.
    """
    views = list(views)

    def window_liveliness(s: int, e: int) -> float:
        if liveliness_fn is not None:
            return liveliness_fn(s, e)
        total = sum(v.duration_ms for v in views[s : e + 1])
        if total <= 0:
            return 0.0
        return sum(v.liveliness * v.duration_ms for v in views[s : e + 1]) / total

    def build(s: int, e: int, dur: int) -> RankedWindow:
        text = " ".join(v.text for v in views[s : e + 1])
        tokens: list[str] = []
        for v in views[s : e + 1]:
            tokens.extend(v.tokens)
        base = score_window(text, tokens, dur, window_liveliness(s, e), keywords, style, target_ms)
        sel = base
        if both_roles_bonus:
            roles = {v.role for v in views[s : e + 1] if v.role}
            if "host" in roles and "guest" in roles:
                sel += BOTH_ROLES_BONUS
        return RankedWindow(
            start=s, end=e,
            first_id=views[s].id, last_id=views[e].id,
            duration_ms=dur, score=base, selection_score=sel,
        )

    banded, fallback = _enumerate(views, target_ms, GENERATION_BAND_MS)
    tier_f = [w for w in banded if abs(w[2] - target_ms) <= FEASIBLE_MARGIN_MS]
    tier_b = [w for w in banded if abs(w[2] - target_ms) > FEASIBLE_MARGIN_MS]

    def ordered(tier, closeness_first: bool = False):
        ranked = [build(s, e, d) for s, e, d in tier]
        if closeness_first:
            key = lambda w: (abs(w.duration_ms - target_ms), -w.selection_score, w.start, w.end)
        else:
            key = lambda w: (-w.selection_score, abs(w.duration_ms - target_ms), w.start, w.end)
        ranked.sort(key=key)
        return ranked

    ranked_f = ordered(tier_f)
    ranked_b = ordered(tier_b)
    ranked_r = ordered(fallback, closeness_first=True)

    picked: list[RankedWindow] = []
    picked_iv: list[tuple[int, int]] = []

    f_intervals = [(w.start, w.end) for w in ranked_f]
    target_feasible = min(3, _max_disjoint(f_intervals, []))
    feasible_picked = 0

    for w in ranked_f:
        if len(picked) >= count:
            break
        iv = (w.start, w.end)
        if any(_overlaps(iv, p) for p in picked_iv):
            continue
        if feasible_picked < target_feasible:
            remaining_needed = target_feasible - feasible_picked - 1
            if _max_disjoint(f_intervals, picked_iv + [iv]) < remaining_needed:
                continue
        picked.append(w)
        picked_iv.append(iv)
        feasible_picked += 1

    for tier in (ranked_b, ranked_r):
        for w in tier:
            if len(picked) >= count:
                break
            iv = (w.start, w.end)
            if any(_overlaps(iv, p) for p in picked_iv):
                continue
            picked.append(w)
            picked_iv.append(iv)

    return picked[:count]
