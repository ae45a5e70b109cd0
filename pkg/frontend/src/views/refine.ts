import { RefineContextDto, SentenceInfo } from "../api.js";
import { h, clear, formatDuration } from "../dom.js";
import { UiSession } from "../session.js";

/**
 * Step 3: sentence-level refinement. Core sentences arrive pre-selected;
 * before/after context and the leading question can be toggled in; rows can
 * be reordered (drag or buttons) and found via search. Every change issues a
 * PUT and the duration readout shows exactly what the server echoed back.
 */
export class RefineScreen {
  private context: RefineContextDto | null = null;
  private order: number[] = [];
  private removeFillers = false;
  private betweenVisible = false;
  private sentenceText = new Map<number, SentenceInfo>();
  private dragId: number | null = null;

  constructor(private session: UiSession, private onAssembled: () => void) {}

  async render(root: HTMLElement): Promise<void> {
    this.context = await this.session.api.refineContext(this.session.projectId);
    for (const info of Object.values(this.context.sentences)) {
      this.sentenceText.set(info.id, info);
    }
    const state = this.session.state;
    if (state?.ordered_ids?.length) {
      this.order = [...state.ordered_ids];
      this.removeFillers = state.remove_fillers;
    } else {
      this.order = [...this.context.core];
    }
    this.paint(root);
    await this.push(root); // initial PUT so the duration readout is server truth
  }

  private label(id: number): string {
    const info = this.sentenceText.get(id);
    return info ? `${id} · ${info.speaker_id}: ${info.text}` : `sentence ${id}`;
  }

  private async push(root: HTMLElement): Promise<void> {
    const status = root.querySelector('[data-testid="refine-status"]') as HTMLElement;
    const readout = root.querySelector('[data-testid="refine-duration"]') as HTMLElement;
    try {
      const echo = await this.session.mutate((api, id) =>
        api.putSelection(id, this.order, this.removeFillers),
      );
      readout.textContent = `${formatDuration(echo.duration_ms)} across ${echo.segment_count} segments`;
      status.textContent = "";
    } catch (error) {
      status.textContent = String((error as Error).message);
    }
  }

  private async toggle(id: number, root: HTMLElement): Promise<void> {
    if (this.order.includes(id)) {
      this.order = this.order.filter((x) => x !== id);
    } else {
      this.order.push(id);
    }
    this.paint(root);
    await this.push(root);
  }

  private async insert(id: number, root: HTMLElement): Promise<void> {
    const status = root.querySelector('[data-testid="refine-status"]') as HTMLElement;
    if (this.order.includes(id)) {
      // mirror the server's 422 for duplicates without a round-trip
      status.textContent = `sentence ${id} is already in the teaser`;
      return;
    }
    this.order.push(id);
    this.paint(root);
    await this.push(root);
  }

  private async move(id: number, delta: number, root: HTMLElement): Promise<void> {
    const index = this.order.indexOf(id);
    const target = index + delta;
    if (index < 0 || target < 0 || target >= this.order.length) return;
    [this.order[index], this.order[target]] = [this.order[target], this.order[index]];
    this.paint(root);
    await this.push(root);
  }

  private async reorderTo(dragged: number, before: number, root: HTMLElement): Promise<void> {
    if (dragged === before) return;
    this.order = this.order.filter((x) => x !== dragged);
    const at = this.order.indexOf(before);
    this.order.splice(at < 0 ? this.order.length : at, 0, dragged);
    this.paint(root);
    await this.push(root);
  }

  private contextRow(id: number, kind: string, root: HTMLElement): HTMLElement {
    const included = this.order.includes(id);
    return h(
      "li",
      { class: `context-row ${kind}${included ? " included" : ""}` },
      h(
        "label",
        {},
        h("input", {
          type: "checkbox",
          "data-testid": `toggle-${id}`,
          checked: included,
          onchange: () => void this.toggle(id, root),
        }),
        ` ${this.label(id)}`,
      ),
    );
  }

  private paint(root: HTMLElement): void {
    const context = this.context;
    if (!context) return;
    clear(root);

    const contextList = h("ul", { class: "context-list" });
    if (context.leading_question !== null) {
      const row = this.contextRow(context.leading_question, "leading-question", root);
      row.prepend(h("span", { class: "tag" }, "leading question "));
      if (context.between.length > 0) {
        row.append(
          h(
            "button",
            {
              class: "link",
              "data-testid": "show-between",
              onclick: () => {
                this.betweenVisible = !this.betweenVisible;
                this.paint(root);
              },
            },
            this.betweenVisible ? "Hide Between" : "Show Between",
          ),
        );
      }
      contextList.append(row);
      if (this.betweenVisible) {
        for (const id of context.between) {
          const betweenRow = this.contextRow(id, "between", root);
          betweenRow.setAttribute("data-testid", "between-row");
          contextList.append(betweenRow);
        }
      }
    }
    for (const id of context.before) contextList.append(this.contextRow(id, "before", root));
    for (const id of context.core) contextList.append(this.contextRow(id, "core", root));
    for (const id of context.after) contextList.append(this.contextRow(id, "after", root));

    const orderList = h("ol", { class: "order-list", "data-testid": "order-list" });
    for (const id of this.order) {
      const row = h(
        "li",
        {
          class: "order-row",
          "data-testid": `order-row-${id}`,
          draggable: "true",
          ondragstart: () => {
            this.dragId = id;
          },
          ondragover: (event) => event.preventDefault(),
          ondrop: () => {
            if (this.dragId !== null) void this.reorderTo(this.dragId, id, root);
            this.dragId = null;
          },
        },
        h("span", { class: "drag-handle" }, "⋮⋮ "),
        this.label(id),
        h("button", { "data-testid": `move-up-${id}`, onclick: () => void this.move(id, -1, root) }, "↑"),
        h("button", { "data-testid": `move-down-${id}`, onclick: () => void this.move(id, 1, root) }, "↓"),
      );
      orderList.append(row);
    }

    const searchInput = h("input", {
      type: "search",
      "data-testid": "search-input",
      placeholder: "find a sentence in the transcript",
    }) as HTMLInputElement;
    const searchResults = h("ul", { class: "search-results", "data-testid": "search-results" });
    const searchButton = h(
      "button",
      {
        "data-testid": "search-submit",
        onclick: async () => {
          const { matches } = await this.session.api.search(this.session.projectId, searchInput.value);
          clear(searchResults);
          for (const match of matches.slice(0, 12)) {
            this.sentenceText.set(match.id, {
              id: match.id, text: match.text, speaker_id: "", role: "", duration_ms: 0,
            });
            searchResults.append(
              h(
                "li",
                {},
                `${match.id}: ${match.text} `,
                h(
                  "button",
                  { "data-testid": `insert-${match.id}`, onclick: () => void this.insert(match.id, root) },
                  "insert",
                ),
              ),
            );
          }
        },
      },
      "Search",
    );

    root.append(
      h("h2", {}, "Refine"),
      h("p", { class: "readout" },
        "Current duration: ",
        h("strong", { "data-testid": "refine-duration" }, "…"),
      ),
      h("label", { class: "filler-toggle" },
        h("input", {
          type: "checkbox",
          "data-testid": "filler-toggle",
          checked: this.removeFillers,
          onchange: async () => {
            this.removeFillers = !this.removeFillers;
            await this.push(root);
          },
        }),
        " remove filler words",
      ),
      h("div", { class: "columns" },
        h("section", {}, h("h3", {}, "Context"), contextList),
        h("section", {}, h("h3", {}, "Teaser order"), orderList),
      ),
      h("section", {}, h("h3", {}, "Search"), h("div", { class: "row" }, searchInput, searchButton), searchResults),
      h("p", { class: "status", "data-testid": "refine-status" }),
      h(
        "button",
        { "data-testid": "refine-next", onclick: () => this.onAssembled() },
        "Next: transitions",
      ),
    );
  }
}
