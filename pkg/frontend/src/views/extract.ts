import { ExtractQuery, ExtractResponse } from "../api.js";
import { h, clear } from "../dom.js";
import { UiSession } from "../session.js";

const STYLES = ["informational", "curiosity_arousing", "funny", "emotional"] as const;
const SPEAKERS: [ExtractQuery["speakers"], string][] = [
  ["guest_only", "Guest only"],
  ["host_only", "Host only"],
  ["both", "Host & guest"],
];

/** Step 1: the four-parameter query form with keyword suggestions. */
export class ExtractScreen {
  constructor(
    private session: UiSession,
    private onResults: (response: ExtractResponse, query: ExtractQuery) => void,
  ) {}

  async render(root: HTMLElement): Promise<void> {
    clear(root);
    const keywordsInput = h("input", {
      type: "text",
      "data-testid": "keywords-input",
      placeholder: "keywords, comma separated",
    }) as HTMLInputElement;

    const lengthSelect = h("select", { "data-testid": "length-select" }) as HTMLSelectElement;
    for (const value of [15, 30, 45]) {
      lengthSelect.append(h("option", { value: String(value), selected: value === 30 }, `${value}s`));
    }
    const speakerSelect = h("select", { "data-testid": "speakers-select" }) as HTMLSelectElement;
    for (const [value, label] of SPEAKERS) {
      speakerSelect.append(h("option", { value, selected: value === "both" }, label));
    }
    const styleSelect = h("select", { "data-testid": "style-select" }) as HTMLSelectElement;
    for (const style of STYLES) {
      styleSelect.append(h("option", { value: style }, style.replace("_", "-")));
    }
    const backendSelect = h("select", { "data-testid": "backend-select" }) as HTMLSelectElement;
    backendSelect.append(h("option", { value: "mock" }, "offline (deterministic)"));
    backendSelect.append(h("option", { value: "llm" }, "language model"));

    const status = h("p", { class: "status", "data-testid": "extract-status" });
    const suggestionRow = h("div", { class: "chips", "data-testid": "keyword-suggestions" });

    const submit = h(
      "button",
      {
        "data-testid": "extract-submit",
        onclick: async (event) => {
          event.preventDefault();
          status.textContent = "searching…";
          const query: ExtractQuery = {
            length_s: Number(lengthSelect.value) as ExtractQuery["length_s"],
            speakers: speakerSelect.value as ExtractQuery["speakers"],
            style: styleSelect.value as ExtractQuery["style"],
            keywords: keywordsInput.value.split(",").map((k) => k.trim()).filter(Boolean),
            backend: backendSelect.value as ExtractQuery["backend"],
          };
          try {
            const response = await this.session.mutate((api, id) => api.extract(id, query, 0));
            status.textContent = response.warning ?? "";
            this.onResults(response, query);
          } catch (error) {
            status.textContent = String((error as Error).message);
          }
        },
      },
      "Find moments",
    );

    root.append(
      h("h2", {}, "Extract"),
      h("form", { class: "extract-form" },
        h("label", {}, "Length ", lengthSelect),
        h("label", {}, "Featured speakers ", speakerSelect),
        h("label", {}, "Style ", styleSelect),
        h("label", {}, "Keywords ", keywordsInput),
        suggestionRow,
        h("label", {}, "Search backend ", backendSelect),
        submit,
      ),
      status,
    );

    try {
      const { suggestions } = await this.session.api.keywordSuggestions(this.session.projectId);
      for (const s of suggestions) {
        suggestionRow.append(
          h(
            "button",
            {
              class: "chip",
              type: "button",
              title: `trend score ${s.trend_score}`,
              onclick: () => {
                const current = keywordsInput.value.split(",").map((k) => k.trim()).filter(Boolean);
                if (!current.includes(s.keyword)) current.push(s.keyword);
                keywordsInput.value = current.join(", ");
              },
            },
            s.keyword,
          ),
        );
      }
    } catch {
      // suggestions are a convenience; the form works without them
    }
  }
}
