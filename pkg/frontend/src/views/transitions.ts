import { TransitionState } from "../api.js";
import { h, clear } from "../dom.js";
import { UiSession } from "../session.js";

/**
 * Step 4: jump cuts detected by the server, with zoom / reaction-shot
 * toggles per boundary. When there are none, the step suggests moving on.
 */
export class TransitionsScreen {
  constructor(private session: UiSession, private onDone: () => void) {}

  async render(root: HTMLElement): Promise<void> {
    const state = await this.session.api.transitions(this.session.projectId);
    this.paint(root, state);
  }

  private paint(root: HTMLElement, state: TransitionState): void {
    clear(root);
    const status = h("p", { class: "status", "data-testid": "transitions-status" });
    const list = h("ul", { class: "jump-cuts", "data-testid": "jump-cuts" });

    if (state.jump_cuts.length === 0) {
      list.append(h("li", { "data-testid": "no-jump-cuts" }, "No jump cuts detected — continue to music."));
    }

    const apply = async (
      boundary: number,
      kind: "zoom" | "reaction",
      present: boolean,
    ): Promise<void> => {
      try {
        const next = present
          ? await this.session.mutate((api, id) => api.removeTransition(id, boundary, kind))
          : await this.session.mutate((api, id) => api.addTransition(id, boundary, kind));
        this.paint(root, next);
      } catch (error) {
        status.textContent = String((error as Error).message);
      }
    };

    for (const cut of state.jump_cuts) {
      list.append(
        h(
          "li",
          { class: "jump-cut", "data-testid": `jump-cut-${cut.boundary_index}` },
          `Jump cut after segment ${cut.boundary_index} (${cut.speaker_id}) `,
          h(
            "button",
            {
              "data-testid": `zoom-${cut.boundary_index}`,
              class: cut.has_zoom ? "active" : "",
              onclick: () => void apply(cut.boundary_index, "zoom", cut.has_zoom),
            },
            cut.has_zoom ? "remove zoom" : "add zoom in/out",
          ),
          h(
            "button",
            {
              "data-testid": `reaction-${cut.boundary_index}`,
              class: cut.has_reaction ? "active" : "",
              onclick: () => void apply(cut.boundary_index, "reaction", cut.has_reaction),
            },
            cut.has_reaction ? "remove reaction shot" : "add reaction shot",
          ),
        ),
      );
    }

    root.append(
      h("h2", {}, "Transitions"),
      list,
      status,
      h("button", { "data-testid": "transitions-next", onclick: () => this.onDone() }, "Next: music"),
    );
  }
}
