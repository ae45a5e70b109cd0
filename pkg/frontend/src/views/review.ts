import { CandidateCard, ExtractQuery, ExtractResponse } from "../api.js";
import { h, clear, formatDuration } from "../dom.js";
import { UiSession } from "../session.js";

/**
 * Step 2: candidate review. Exactly three cards per page; "Show More" fetches
 * the next page without dropping the current selection. Next stays disabled
 * until a card is picked.
 */
export class ReviewScreen {
  private pages: CandidateCard[][] = [];
  private selectedIndex: number | null = null;

  constructor(
    private session: UiSession,
    private query: ExtractQuery,
    private onSelected: () => void,
  ) {}

  loadInitial(response: ExtractResponse): void {
    this.pages = [response.candidates];
  }

  render(root: HTMLElement): void {
    clear(root);
    const list = h("div", { class: "cards", "data-testid": "card-list" });
    const status = h("p", { class: "status", "data-testid": "review-status" });
    const nextButton = h(
      "button",
      {
        "data-testid": "review-next",
        disabled: true,
        onclick: async () => {
          if (this.selectedIndex === null) return;
          try {
            await this.session.mutate((api, id) => api.select(id, this.selectedIndex as number));
            this.onSelected();
          } catch (error) {
            status.textContent = String((error as Error).message);
          }
        },
      },
      "Next",
    );
    const showMore = h(
      "button",
      {
        "data-testid": "show-more",
        onclick: async () => {
          try {
            const response = await this.session.mutate((api, id) =>
              api.extract(id, this.query, this.pages.length),
            );
            if (response.candidates.length === 0) {
              status.textContent = response.warning ?? "no further candidates";
              return;
            }
            this.pages.push(response.candidates);
            this.render(root);
          } catch (error) {
            status.textContent = String((error as Error).message);
          }
        },
      },
      "Show More",
    );

    for (const page of this.pages) {
      const pageEl = h("div", { class: "card-page", "data-testid": "card-page" });
      for (const card of page) {
        pageEl.append(this.renderCard(card, root));
      }
      list.append(pageEl);
    }

    root.append(h("h2", {}, "Review"), list, h("div", { class: "row" }, showMore, nextButton), status);
    this.syncNextButton(root);
  }

  private renderCard(card: CandidateCard, root: HTMLElement): HTMLElement {
    const speakers = Object.entries(card.speakers_featured)
      .map(([speakerId, role]) => {
        const liveliness = card.liveliness_by_speaker[speakerId];
        const level = liveliness === undefined ? "" : ` ${(liveliness * 100).toFixed(0)}%`;
        return `${speakerId} (${role})${level}`;
      })
      .join(", ");

    const keywordChips = h("div", { class: "chips" });
    for (const keyword of this.query.keywords) {
      const contained = card.keywords_contained.includes(keyword);
      keywordChips.append(
        h("span", { class: contained ? "chip contained" : "chip missing" }, keyword),
      );
    }

    const transcript = h("p", { class: "preview" }, card.preview + "…");
    let expanded = false;
    const expand = h(
      "button",
      {
        class: "link",
        "data-testid": `expand-${card.index}`,
        onclick: () => {
          expanded = !expanded;
          transcript.textContent = expanded ? card.full_text : card.preview + "…";
        },
      },
      "…",
    );

    return h(
      "div",
      {
        class: "card",
        "data-testid": "candidate-card",
        "data-index": String(card.index),
        onclick: () => {
          this.selectedIndex = card.index;
          this.syncNextButton(root);
        },
      },
      h("h3", {},
        card.tagline,
        card.tagline_degraded ? h("span", { class: "badge", "data-testid": "degraded-badge" }, "auto") : null,
      ),
      h("p", { class: "meta" },
        `${formatDuration(card.duration_ms)} · overall liveliness ${(card.liveliness_overall * 100).toFixed(0)}%`,
      ),
      h("p", { class: "meta" }, speakers),
      keywordChips,
      transcript,
      expand,
    );
  }

  private syncNextButton(root: HTMLElement): void {
    const next = root.querySelector('[data-testid="review-next"]') as HTMLButtonElement | null;
    if (next) next.disabled = this.selectedIndex === null;
    root.querySelectorAll('[data-testid="candidate-card"]').forEach((el) => {
      const card = el as HTMLElement;
      card.classList.toggle("selected", card.dataset.index === String(this.selectedIndex));
    });
  }
}
