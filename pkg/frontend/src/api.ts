// Typed client for the teasercut service. The UI keeps no business logic:
// every duration, jump cut, and plan value shown on screen comes from these
// responses.

export interface MomentDto {
  first_sentence: number;
  last_sentence: number;
  duration_ms: number;
  source_backend: string;
}

export interface CandidateCard {
  index: number;
  moment: MomentDto;
  tagline: string;
  tagline_degraded: boolean;
  duration_ms: number;
  speakers_featured: Record<string, string>;
  liveliness_by_speaker: Record<string, number>;
  liveliness_overall: number;
  keywords_contained: string[];
  preview: string;
  full_text: string;
}

export interface ExtractResponse {
  page: number;
  candidates: CandidateCard[];
  total_candidates: number;
  warning: string | null;
}

export interface ExtractQuery {
  length_s: 15 | 30 | 45;
  speakers: "host_only" | "guest_only" | "both";
  style: "informational" | "curiosity_arousing" | "funny" | "emotional";
  keywords: string[];
  backend: "mock" | "llm";
}

export interface SentenceInfo {
  id: number;
  text: string;
  speaker_id: string;
  role: string;
  duration_ms: number;
}

export interface RefineContextDto {
  core: number[];
  before: number[];
  after: number[];
  leading_question: number | null;
  between: number[];
  sentences: Record<string, SentenceInfo>;
}

export interface SelectionEcho {
  duration_ms: number;
  fillers_removed: boolean;
  segment_count: number;
  step: string;
}

export interface JumpCutDto {
  boundary_index: number;
  speaker_id: string;
  has_zoom: boolean;
  has_reaction: boolean;
}

export interface TransitionState {
  jump_cuts: JumpCutDto[];
  segment_count: number;
}

export interface KeywordSuggestionDto {
  keyword: string;
  trend_score: number;
}

export interface MusicResponse {
  style: string | null;
  emphasis: { sentence_id: number; source: string; degraded: boolean } | null;
  music_plan: unknown;
  step: string;
}

export interface ProjectState {
  id: string;
  step: string;
  query: unknown;
  candidates: MomentDto[];
  overviews: Omit<CandidateCard, "index">[];
  extraction_warning: string | null;
  selected_index: number | null;
  ordered_ids: number[] | null;
  remove_fillers: boolean;
  cutlist: unknown;
  emphasis: { sentence_id: number } | null;
  music_style: string | null;
  caption_style: string | null;
  aspect: string | null;
  audit: { seq: number; action: string }[];
}

export type ExportKind = "edl" | "srt" | "vtt" | "render-script";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  private mutationInFlight = false;

  constructor(readonly baseUrl: string) {}

  /** One in-flight mutation per project, enforced client-side. */
  private async mutate<T>(run: () => Promise<T>): Promise<T> {
    if (this.mutationInFlight) {
      throw new ApiError(0, "another change is still being applied");
    }
    this.mutationInFlight = true;
    try {
      return await run();
    } finally {
      this.mutationInFlight = false;
    }
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  private async sendJson<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  async createProject(bundle: Blob | Uint8Array, filename = "bundle.json"): Promise<{ id: string }> {
    // hand-rolled multipart: FormData/Blob globals differ between browser
    // realms and test DOMs, while a plain byte body works everywhere
    const bytes =
      bundle instanceof Uint8Array ? bundle : new Uint8Array(await bundle.arrayBuffer());
    const boundary = "----teasercut" + Math.random().toString(16).slice(2);
    const encoder = new TextEncoder();
    const head = encoder.encode(
      `--${boundary}\r\n` +
        `Content-Disposition: form-data; name="bundle"; filename="${filename}"\r\n` +
        `Content-Type: application/json\r\n\r\n`,
    );
    const tail = encoder.encode(`\r\n--${boundary}--\r\n`);
    const body = new Uint8Array(head.length + bytes.length + tail.length);
    body.set(head, 0);
    body.set(bytes, head.length);
    body.set(tail, head.length + bytes.length);
    return this.mutate(async () => {
      const response = await fetch(this.baseUrl + "/projects", {
        method: "POST",
        headers: { "Content-Type": `multipart/form-data; boundary=${boundary}` },
        body,
      });
      await raiseForStatus(response);
      return (await response.json()) as { id: string };
    });
  }

  getProject(id: string): Promise<ProjectState> {
    return this.getJson(`/projects/${id}`);
  }

  extract(id: string, query: ExtractQuery, page = 0): Promise<ExtractResponse> {
    return this.mutate(() =>
      this.sendJson("POST", `/projects/${id}/extract?page=${page}`, query),
    );
  }

  keywordSuggestions(id: string): Promise<{ suggestions: KeywordSuggestionDto[] }> {
    return this.getJson(`/projects/${id}/keywords`);
  }

  select(id: string, candidate: number): Promise<{ selected_index: number; step: string }> {
    return this.mutate(() => this.sendJson("POST", `/projects/${id}/select`, { candidate }));
  }

  refineContext(id: string): Promise<RefineContextDto> {
    return this.getJson(`/projects/${id}/refine/context`);
  }

  search(id: string, q: string): Promise<{ matches: { id: number; text: string }[] }> {
    return this.getJson(`/projects/${id}/search?q=${encodeURIComponent(q)}`);
  }

  putSelection(id: string, orderedIds: number[], removeFillers: boolean): Promise<SelectionEcho> {
    return this.mutate(() =>
      this.sendJson("PUT", `/projects/${id}/selection`, {
        ordered_ids: orderedIds,
        remove_fillers: removeFillers,
      }),
    );
  }

  transitions(id: string): Promise<TransitionState> {
    return this.getJson(`/projects/${id}/transitions`);
  }

  addTransition(id: string, boundary: number, kind: "zoom" | "reaction"): Promise<TransitionState> {
    return this.mutate(() =>
      this.sendJson("POST", `/projects/${id}/transitions/${boundary}/${kind}`),
    );
  }

  removeTransition(id: string, boundary: number, kind: "zoom" | "reaction"): Promise<TransitionState> {
    return this.mutate(() =>
      this.sendJson("DELETE", `/projects/${id}/transitions/${boundary}/${kind}`),
    );
  }

  setMusic(id: string, style: string, emphasisSentenceId?: number): Promise<MusicResponse> {
    return this.mutate(() =>
      this.sendJson("POST", `/projects/${id}/music`, {
        style,
        emphasis_sentence_id: emphasisSentenceId ?? null,
      }),
    );
  }

  finish(
    id: string,
    aspect: "vertical" | "square" | "horizontal",
    captionStyle: "standard" | "rapid",
    logo?: { image_ref: string; corner?: string; margin_px?: number; span?: string },
  ): Promise<{ aspect: string; caption_style: string; caption_cues: number; step: string }> {
    return this.mutate(() =>
      this.sendJson("POST", `/projects/${id}/finish`, {
        aspect,
        caption_style: captionStyle,
        logo: logo ?? null,
      }),
    );
  }

  async exportDocument(id: string, kind: ExportKind): Promise<Uint8Array> {
    const response = await fetch(`${this.baseUrl}/projects/${id}/export/${kind}`);
    await raiseForStatus(response);
    return new Uint8Array(await response.arrayBuffer());
  }
}
