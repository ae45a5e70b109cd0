"""Chat-completion gateway: prompt construction, backends, reply parsing.

Four prompt templates drive the co-creation flow: episode keyword suggestion,
clip extraction, per-clip tagline, and emphasis-point pick. Replies are
parsed defensively; a reply that parses but breaks the prompt's stated
contract (overlapping clips, out-of-range ids, ...) raises ContractViolation
so the caller can re-ask.

Two backends: a remote HTTP chat-completion client (endpoint/model/key from
LLM_ENDPOINT / LLM_MODEL / LLM_API_KEY) and a deterministic offline mock.
The mock answers an extraction prompt by re-parsing the transcript embedded
in the prompt and running the same window-selection machinery the heuristic
extractor uses, so offline end-to-end runs exercise the real downstream code.
"""

from __future__ import annotations

import logging
import os
import re
import threading
import time
from collections import Counter
from dataclasses import dataclass, field

from .bundle import FeatureBundle
from .errors import BackendUnavailable, ContractViolation, ParseError, RateLimited, TransportError
from .text import tokenize
from .windows import WindowSentence, rank_and_select

log = logging.getLogger("teasercut.llm")

TEMPLATE_NAMES = ("keywords", "extract", "tagline", "emphasis")

MAX_TAGLINE_WORDS = 10
CONTRACT_RETRIES = 2  # re-asks after a contract-violating or unparseable reply

_STOPWORDS = frozenset(
    """a an and are as at be been but by can could did do does for from had has have he her him his
    i if in into is it its just like me my no not of on or our out she so some than that the their
    them then there these they this to us was we were what when which who will with would you your
    yeah yes well really going think know thing things going gonna lot kind mean right okay oh um uh
    get got say said one two way time very much more most also about over actually""".split()
)


# --- prompt templates (context values substituted into fixed wording) ----------

def render_keywords_prompt(bundle: FeatureBundle) -> str:
    lines = "\n".join(f"{s.id}: {bundle.sentence_text(s.id)}" for s in bundle.sentences)
    return (
        "Provide six main topic keywords for the following transcript.\n"
        "Transcript:\n"
        f"{lines}"
    )


def render_extract_prompt(bundle: FeatureBundle, query) -> str:
    from .bundle import sentence_duration

    lines = "\n".join(
        f"{s.id} [{sentence_duration(bundle, s.id) / 1000:.1f}]: ({s.speaker_id}) {bundle.sentence_text(s.id)}"
        for s in bundle.sentences
    )
    if query.speakers == "host_only":
        allowed = [s.id for s in bundle.speakers if s.role == "host"]
    elif query.speakers == "guest_only":
        allowed = [s.id for s in bundle.speakers if s.role == "guest"]
    else:
        allowed = [s.id for s in bundle.speakers]
    style_label = query.style.replace("_", "-")
    keyword_line = ""
    if query.keywords:
        keyword_line = f"The clip should contain the keywords of {', '.join(query.keywords)}.\n"
    return (
        "This is the transcript of a podcast episode.\n"
        "Transcript:\n"
        f"{lines}\n"
        f"Select consecutive sentences to create a clip that must be around {query.target_length_s} seconds long.\n"
        f"The clip should only include the following speakers: {', '.join(allowed)}.\n"
        f"The clip should be {style_label}.\n"
        f"{keyword_line}"
        "The transcript is given as a list of sentences with ID and duration in seconds. "
        "Only return the sentence IDs to form the clip. Do not include full sentences in your reply. "
        "Must return three distinct and non-over-lapping options of such clips. "
        "Use the following format: [a, b, c], [m, n, q], [x, y, z]."
    )


def render_tagline_prompt(clip_text: str) -> str:
    return (
        f"Come up with a catchy and short tagline for each of the clips. {clip_text}. "
        "The tagline should be less than ten words."
    )


def render_emphasis_prompt(bundle: FeatureBundle, sentence_ids) -> str:
    lines = "\n".join(f"{sid}: {bundle.sentence_text(sid)}" for sid in sentence_ids)
    return (
        "This is the transcript of a podcast clip.\n"
        "Transcript:\n"
        f"{lines}\n"
        "Select one single sentence as the emphasis point in the clip. "
        "The transcript is given as a list of sentences with IDs. "
        "Only return one sentence ID you think should be emphasized. "
        "Must not include full sentences in your reply."
    )


def classify_prompt(prompt: str) -> str | None:
    if "Provide six main topic keywords" in prompt:
        return "keywords"
    if "Select consecutive sentences" in prompt:
        return "extract"
    if "catchy and short tagline" in prompt:
        return "tagline"
    if "emphasis point" in prompt:
        return "emphasis"
    return None


# --- backends -------------------------------------------------------------------

def _top_terms(texts, n: int) -> list[str]:
    counts: Counter[str] = Counter()
    first_seen: dict[str, int] = {}
    for text in texts:
        for tok in tokenize(text):
            if tok in _STOPWORDS or len(tok) < 3:
                continue
            counts[tok] += 1
            first_seen.setdefault(tok, len(first_seen))
    ranked = sorted(counts, key=lambda t: (-counts[t], t))
    return ranked[:n]


_PROMPT_SENTENCE_RE = re.compile(r"^(\d+) \[(\d+\.\d+)\]: \(([^)]*)\) (.*)$")
_PLAIN_SENTENCE_RE = re.compile(r"^(\d+): (.*)$")


@dataclass
class MockBackend:
    """Deterministic offline stand-in: same (seed, prompt) -> same reply."""

    seed: int = 0
    kind: str = field(default="mock", init=False)

    def complete(self, prompt: str) -> str:
        template = classify_prompt(prompt)
        if template == "keywords":
            return self._keywords_reply(prompt)
        if template == "extract":
            return self._extract_reply(prompt)
        if template == "tagline":
            return self._tagline_reply(prompt)
        if template == "emphasis":
            return self._emphasis_reply(prompt)
        return "OK"

    def _transcript_texts(self, prompt: str) -> list[str]:
        texts = []
        for line in prompt.splitlines():
            m = _PROMPT_SENTENCE_RE.match(line) or _PLAIN_SENTENCE_RE.match(line)
            if m:
                texts.append(m.group(m.lastindex))
        return texts

    def _keywords_reply(self, prompt: str) -> str:
        terms = _top_terms(self._transcript_texts(prompt), 6)
        while len(terms) < 6:  # degenerate transcripts: pad with placeholders
            terms.append(f"topic{len(terms) + 1}")
        return "\n".join(f"{i + 1}. {t}" for i, t in enumerate(terms))

    def _extract_reply(self, prompt: str) -> str:
        views = []
        for line in prompt.splitlines():
            m = _PROMPT_SENTENCE_RE.match(line)
            if not m:
                continue
            sid, dur_s, speaker, text = int(m.group(1)), float(m.group(2)), m.group(3), m.group(4)
            views.append((sid, round(dur_s * 1000), speaker, text))
        target_m = re.search(r"around (\d+) seconds", prompt)
        allowed_m = re.search(r"following speakers: (.*?)\.\n", prompt)
        style_m = re.search(r"The clip should be ([a-z-]+)\.", prompt)
        kw_m = re.search(r"contain the keywords of (.*?)\.\n", prompt)
        target_ms = int(target_m.group(1)) * 1000 if target_m else 30_000
        allowed = {s.strip() for s in allowed_m.group(1).split(",")} if allowed_m else None
        style = style_m.group(1).replace("-", "_") if style_m else "informational"
        keywords = [k.strip() for k in kw_m.group(1).split(",")] if kw_m else []
        sentence_views = [
            WindowSentence(
                id=sid,
                duration_ms=dur,
                allowed=(allowed is None or speaker in allowed),
                text=text,
                tokens=tuple(tokenize(text)),
            )
            for sid, dur, speaker, text in views
        ]
        picked = rank_and_select(sentence_views, target_ms, keywords, style, count=3)
        id_by_pos = [v.id for v in sentence_views]
        groups = []
        for w in picked:
            groups.append("[" + ", ".join(str(id_by_pos[p]) for p in range(w.start, w.end + 1)) + "]")
        return ", ".join(groups)

    def _tagline_reply(self, prompt: str) -> str:
        m = re.search(r"for each of the clips\. (.*)\. The tagline should", prompt, re.DOTALL)
        content = m.group(1) if m else prompt
        terms = _top_terms([content], 3)
        while len(terms) < 3:
            terms.append("more")
        a, b, c = (t.capitalize() for t in terms[:3])
        return f"{a}, {b}, And {c}: The Moment That Matters"

    def _emphasis_reply(self, prompt: str) -> str:
        ids = [int(m.group(1)) for m in map(_PLAIN_SENTENCE_RE.match, prompt.splitlines()) if m]
        if not ids:
            return "0"
        return str(ids[-1])


class RemoteBackend:
    """HTTP chat-completion client (OpenAI-style message schema).

    429 responses are retried with exponential backoff up to three attempts;
    persistent rate limiting raises RateLimited. Connection failures raise
    TransportError, 5xx raises BackendUnavailable. A semaphore caps in-flight
    requests.
    """

    kind = "remote"

    def __init__(
        self,
        endpoint: str | None = None,
        model: str | None = None,
        api_key: str | None = None,
        transport=None,
        max_inflight: int = 4,
        backoff_s: float = 0.5,
        timeout_s: float = 60.0,
    ) -> None:
        self.endpoint = endpoint or os.environ.get("LLM_ENDPOINT", "")
        self.model = model or os.environ.get("LLM_MODEL", "")
        self.api_key = api_key or os.environ.get("LLM_API_KEY", "")
        if not self.endpoint:
            raise BackendUnavailable("remote backend not configured: set LLM_ENDPOINT")
        self._transport = transport
        self._backoff_s = backoff_s
        self._timeout_s = timeout_s
        self._gate = threading.Semaphore(max_inflight)

    def complete(self, prompt: str) -> str:
        import httpx

        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        attempts = 3
        with self._gate:
            with httpx.Client(transport=self._transport, timeout=self._timeout_s) as client:
                for attempt in range(attempts):
                    try:
                        resp = client.post(self.endpoint, json=payload, headers=headers)
                    except httpx.HTTPError as exc:
                        raise TransportError(f"completion request failed: {exc}") from exc
                    if resp.status_code == 429:
                        if attempt < attempts - 1:
                            time.sleep(self._backoff_s * 2**attempt)
                            continue
                        raise RateLimited("backend kept returning 429 after 3 attempts")
                    if resp.status_code >= 500:
                        raise BackendUnavailable(f"backend returned {resp.status_code}")
                    if resp.status_code >= 400:
                        raise TransportError(f"backend rejected request: {resp.status_code} {resp.text[:200]}")
                    try:
                        return resp.json()["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, TypeError, ValueError) as exc:
                        raise TransportError(f"malformed completion response: {exc}") from exc
        raise BackendUnavailable("unreachable")


def backend_from_env(seed: int = 0):
    """RemoteBackend when LLM_ENDPOINT is configured, else the offline mock."""
    if os.environ.get("LLM_ENDPOINT"):
        return RemoteBackend()
    return MockBackend(seed=seed)


def complete(backend, prompt: str) -> str:
    """Run one completion. Raw model text comes back untouched."""
    return backend.complete(prompt)


# --- reply parsers ----------------------------------------------------------------

_BRACKET_GROUP_RE = re.compile(r"\[([^\[\]]*)\]")
_INT_RE = re.compile(r"\d+")


def parse_clip_response(text: str, bundle: FeatureBundle) -> list[list[int]]:
    """Parse "[a, b, c], [m, n, q], [x, y, z]" into three sentence-id lists.

    ParseError: not exactly three bracketed integer lists, or empty lists.
    ContractViolation: unknown ids, a list that is not consecutive in the
    transcript, or ranges that overlap.
    """
    groups = _BRACKET_GROUP_RE.findall(text)
    if len(groups) != 3:
        raise ParseError(f"expected three bracketed clip lists, found {len(groups)}")
    clips: list[list[int]] = []
    for raw in groups:
        items = [part.strip() for part in raw.split(",")]
        if items == [""]:
            raise ParseError("clip list is empty")
        ids = []
        for part in items:
            if not re.fullmatch(r"\d+", part):
                raise ParseError(f"clip list entry {part!r} is not a sentence id")
            ids.append(int(part))
        clips.append(ids)

    seen: set[int] = set()
    for ids in clips:
        positions = []
        for sid in ids:
            if not bundle.has_sentence(sid):
                raise ContractViolation(f"unknown sentence id {sid}")
            positions.append(bundle.position(sid))
        for a, b in zip(positions, positions[1:]):
            if b != a + 1:
                raise ContractViolation(f"clip {ids} is not a consecutive sentence run")
        for pos in positions:
            if pos in seen:
                raise ContractViolation(f"clips overlap at sentence {bundle.sentence_at(pos).id}")
            seen.add(pos)
    return clips


_BULLET_RE = re.compile(r"^\s*(?:\d+[\.\)]\s*|[-*•]\s*)?(.*?)\s*$")


def parse_keyword_response(text: str) -> list[str]:
    """Recover exactly six distinct keywords from a numbered/bulleted/comma list."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    items: list[str] = []
    if len(lines) == 1 and "," in lines[0]:
        items = [part.strip() for part in lines[0].split(",")]
    else:
        for ln in lines:
            m = _BULLET_RE.match(ln)
            if m and m.group(1):
                items.append(m.group(1))
    cleaned: list[str] = []
    for item in items:
        kw = item.strip().strip("\"'").lower().rstrip(".")
        if kw and kw not in cleaned:
            cleaned.append(kw)
    if len(cleaned) < 6:
        raise ParseError(f"expected six keywords, recovered {len(cleaned)}")
    return cleaned[:6]


def parse_single_sentence_id(text: str, candidate_ids) -> int:
    """First integer in the reply that is a valid candidate id.

    ParseError when the reply carries no integer at all; ContractViolation
    when integers are present but none is a candidate.
    """
    candidates = set(candidate_ids)
    found = [int(m.group(0)) for m in _INT_RE.finditer(text)]
    if not found:
        raise ParseError("reply contains no sentence id")
    for value in found:
        if value in candidates:
            return value
    raise ContractViolation(f"reply ids {found} are not among candidates {sorted(candidates)}")


def parse_tagline_response(text: str) -> str:
    """Clean the tagline reply and enforce the ten-word cap by truncation."""
    line = text.strip().splitlines()[0] if text.strip() else ""
    line = line.strip().strip("\"'")
    line = re.sub(r"^[Tt]agline\s*:\s*", "", line).strip()
    if not line:
        raise ParseError("empty tagline reply")
    word_list = line.split()
    if len(word_list) > MAX_TAGLINE_WORDS:
        log.debug("tagline exceeded %d words; truncating", MAX_TAGLINE_WORDS)
        line = " ".join(word_list[:MAX_TAGLINE_WORDS])
    return line
