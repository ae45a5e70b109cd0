import { ApiClient, ExtractQuery, ExtractResponse } from "./api.js";
import { h, clear } from "./dom.js";
import { UiSession } from "./session.js";
import { ExtractScreen } from "./views/extract.js";
import { FinishScreen } from "./views/finish.js";
import { MusicScreen } from "./views/music.js";
import { RefineScreen } from "./views/refine.js";
import { ReviewScreen } from "./views/review.js";
import { TransitionsScreen } from "./views/transitions.js";

const STEPS = ["extract", "review", "refine", "transitions", "music", "finish"] as const;
export type StepName = (typeof STEPS)[number];

/**
 * Wizard over the six workflow steps. Tabs mirror the server's step order;
 * navigating backward warns that downstream artifacts get reset (the server
 * clears them on re-extract / re-select).
 */
export class TeaserApp {
  session: UiSession;
  current: StepName = "extract";
  finishScreen: FinishScreen;
  private reviewScreen: ReviewScreen | null = null;
  private stepRoot: HTMLElement;
  private tabBar: HTMLElement;

  constructor(readonly api: ApiClient, projectId: string, private root: HTMLElement) {
    this.session = new UiSession(api, projectId);
    this.finishScreen = new FinishScreen(this.session);
    this.tabBar = h("nav", { class: "tabs", "data-testid": "tabs" });
    this.stepRoot = h("main", { class: "step", "data-testid": "step-root" });
    clear(root);
    root.append(h("h1", {}, "teasercut"), this.tabBar, this.stepRoot);
  }

  static async create(api: ApiClient, projectId: string, root: HTMLElement): Promise<TeaserApp> {
    const app = new TeaserApp(api, projectId, root);
    await app.session.reconcile();
    await app.goTo("extract", { confirmReset: false });
    return app;
  }

  private reachable(step: StepName): boolean {
    const state = this.session.state;
    if (!state) return step === "extract";
    switch (step) {
      case "extract":
        return true;
      case "review":
        return state.candidates.length > 0;
      case "refine":
        return state.selected_index !== null;
      case "transitions":
      case "music":
      case "finish":
        return state.cutlist !== null;
    }
  }

  async goTo(step: StepName, options: { confirmReset?: boolean } = {}): Promise<void> {
    const movingBackward = STEPS.indexOf(step) < STEPS.indexOf(this.current);
    if (movingBackward && options.confirmReset !== false) {
      const ok = window.confirm(
        "Going back re-runs this step and resets everything after it. Continue?",
      );
      if (!ok) return;
    }
    this.current = step;
    this.renderTabs();
    clear(this.stepRoot);

    switch (step) {
      case "extract": {
        const screen = new ExtractScreen(this.session, (response, query) =>
          void this.showReview(response, query),
        );
        await screen.render(this.stepRoot);
        break;
      }
      case "review": {
        if (this.reviewScreen) this.reviewScreen.render(this.stepRoot);
        break;
      }
      case "refine": {
        const screen = new RefineScreen(this.session, () => void this.goTo("transitions"));
        await screen.render(this.stepRoot);
        break;
      }
      case "transitions": {
        const screen = new TransitionsScreen(this.session, () => void this.goTo("music"));
        await screen.render(this.stepRoot);
        break;
      }
      case "music": {
        const screen = new MusicScreen(this.session, () => void this.goTo("finish"));
        await screen.render(this.stepRoot);
        break;
      }
      case "finish": {
        this.finishScreen.render(this.stepRoot);
        break;
      }
    }
  }

  private async showReview(response: ExtractResponse, query: ExtractQuery): Promise<void> {
    this.reviewScreen = new ReviewScreen(this.session, query, () => void this.goTo("refine"));
    this.reviewScreen.loadInitial(response);
    await this.goTo("review", { confirmReset: false });
  }

  private renderTabs(): void {
    clear(this.tabBar);
    for (const step of STEPS) {
      this.tabBar.append(
        h(
          "button",
          {
            class: `tab${step === this.current ? " current" : ""}`,
            "data-testid": `tab-${step}`,
            disabled: !this.reachable(step),
            onclick: () => void this.goTo(step),
          },
          step,
        ),
      );
    }
  }
}

/** Entry point for the browser: upload form, then the wizard. */
export async function mount(root: HTMLElement, baseUrl: string): Promise<void> {
  const api = new ApiClient(baseUrl);
  const fileInput = h("input", { type: "file", accept: ".json" }) as HTMLInputElement;
  const status = h("p", { class: "status" });
  const upload = h(
    "button",
    {
      onclick: async () => {
        const file = fileInput.files?.[0];
        if (!file) {
          status.textContent = "pick an episode feature bundle (.json) first";
          return;
        }
        try {
          const { id } = await api.createProject(file, file.name);
          await TeaserApp.create(api, id, root);
        } catch (error) {
          status.textContent = String((error as Error).message);
        }
      },
    },
    "Create project",
  );
  clear(root);
  root.append(
    h("h1", {}, "teasercut"),
    h("p", {}, "Upload an episode feature bundle to start a teaser project."),
    h("div", { class: "row" }, fileInput, upload),
    status,
  );
}
