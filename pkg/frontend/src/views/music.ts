import { MusicResponse } from "../api.js";
import { h, clear } from "../dom.js";
import { UiSession } from "../session.js";

const MUSIC_STYLES = ["inspirational", "emotional", "uplifting", "light_hearted", "none"] as const;

/**
 * Step 5: pick a music style; the server detects the emphasis sentence and
 * aligns the track's peak to it. Clicking another sentence re-plans with
 * that emphasis.
 */
export class MusicScreen {
  private style: string = "none";
  private lastResponse: MusicResponse | null = null;
  private sentenceTexts = new Map<number, string>();

  constructor(private session: UiSession, private onDone: () => void) {}

  async render(root: HTMLElement): Promise<void> {
    const { matches } = await this.session.api.search(this.session.projectId, "");
    for (const match of matches) this.sentenceTexts.set(match.id, match.text);
    this.style = this.session.state?.music_style ?? "none";
    this.paint(root);
  }

  private async choose(root: HTMLElement, style: string, emphasis?: number): Promise<void> {
    const status = root.querySelector('[data-testid="music-status"]') as HTMLElement;
    try {
      this.lastResponse = await this.session.mutate((api, id) => api.setMusic(id, style, emphasis));
      this.style = style;
      this.paint(root);
    } catch (error) {
      status.textContent = String((error as Error).message);
    }
  }

  private paint(root: HTMLElement): void {
    clear(root);
    const status = h("p", { class: "status", "data-testid": "music-status" });
    const styleRow = h("div", { class: "row" });
    for (const style of MUSIC_STYLES) {
      styleRow.append(
        h(
          "button",
          {
            "data-testid": `music-${style}`,
            class: this.style === style ? "active" : "",
            onclick: () => void this.choose(root, style),
          },
          style.replace("_", "-"),
        ),
      );
    }

    const emphasisId =
      this.lastResponse?.emphasis?.sentence_id ?? this.session.state?.emphasis?.sentence_id ?? null;
    const sentenceList = h("ul", { class: "emphasis-list", "data-testid": "emphasis-list" });
    for (const id of this.session.state?.ordered_ids ?? []) {
      const isEmphasis = id === emphasisId;
      sentenceList.append(
        h(
          "li",
          {
            class: isEmphasis ? "emphasis" : "",
            "data-testid": `emphasis-row-${id}`,
            onclick: () => {
              if (this.style !== "none") void this.choose(root, this.style, id);
            },
          },
          isEmphasis ? "★ " : "",
          `${id}: ${this.sentenceTexts.get(id) ?? ""}`,
        ),
      );
    }

    root.append(
      h("h2", {}, "Music"),
      styleRow,
      h("p", { class: "meta", "data-testid": "emphasis-readout" },
        emphasisId === null
          ? "no music selected"
          : `music peak lands on sentence ${emphasisId}`,
      ),
      sentenceList,
      status,
      h("button", { "data-testid": "music-next", onclick: () => this.onDone() }, "Next: finish"),
    );
  }
}
