import { ExportKind } from "../api.js";
import { h, clear } from "../dom.js";
import { UiSession } from "../session.js";

/** Step 6: aspect/captions/logo, then export downloads. */
export class FinishScreen {
  lastDownloads = new Map<ExportKind, Uint8Array>();

  constructor(private session: UiSession) {}

  render(root: HTMLElement): void {
    clear(root);
    const status = h("p", { class: "status", "data-testid": "finish-status" });

    const aspectSelect = h("select", { "data-testid": "aspect-select" }) as HTMLSelectElement;
    for (const aspect of ["vertical", "square", "horizontal"]) {
      aspectSelect.append(h("option", { value: aspect }, aspect));
    }
    const captionSelect = h("select", { "data-testid": "caption-select" }) as HTMLSelectElement;
    for (const style of ["standard", "rapid"]) {
      captionSelect.append(h("option", { value: style }, style));
    }
    const logoInput = h("input", {
      type: "text",
      "data-testid": "logo-input",
      placeholder: "logo image path (optional)",
    }) as HTMLInputElement;

    const exportsRow = h("div", { class: "row", "data-testid": "exports-row" });

    const applyButton = h(
      "button",
      {
        "data-testid": "finish-apply",
        onclick: async () => {
          try {
            const logoRef = logoInput.value.trim();
            const result = await this.session.mutate((api, id) =>
              api.finish(
                id,
                aspectSelect.value as "vertical" | "square" | "horizontal",
                captionSelect.value as "standard" | "rapid",
                logoRef ? { image_ref: logoRef } : undefined,
              ),
            );
            status.textContent = `ready: ${result.caption_cues} caption cues, ${result.aspect} reframe`;
            this.renderExports(exportsRow, status);
          } catch (error) {
            status.textContent = String((error as Error).message);
          }
        },
      },
      "Apply finishing",
    );

    root.append(
      h("h2", {}, "Finish"),
      h("label", {}, "Aspect ratio ", aspectSelect),
      h("label", {}, "Caption style ", captionSelect),
      h("label", {}, "Logo ", logoInput),
      applyButton,
      status,
      exportsRow,
    );

    if (this.session.state?.step === "done") {
      this.renderExports(exportsRow, status);
    }
  }

  private renderExports(row: HTMLElement, status: HTMLElement): void {
    clear(row);
    const kinds: [ExportKind, string][] = [
      ["edl", "Download EDL"],
      ["srt", "Download SRT"],
      ["vtt", "Download VTT"],
      ["render-script", "Download render script"],
    ];
    for (const [kind, label] of kinds) {
      row.append(
        h(
          "button",
          {
            "data-testid": `export-${kind}`,
            onclick: async () => {
              try {
                const bytes = await this.session.api.exportDocument(this.session.projectId, kind);
                this.lastDownloads.set(kind, bytes);
                this.triggerDownload(kind, bytes);
                status.textContent = `downloaded ${kind} (${bytes.byteLength} bytes)`;
              } catch (error) {
                status.textContent = String((error as Error).message);
              }
            },
          },
          label,
        ),
      );
    }
  }

  private triggerDownload(kind: ExportKind, bytes: Uint8Array): void {
    // downloads are browser-only sugar; test DOMs skip the anchor dance
    if (typeof URL.createObjectURL !== "function") return;
    if (typeof navigator !== "undefined" && navigator.userAgent.includes("jsdom")) return;
    const names: Record<ExportKind, string> = {
      edl: "teaser.edl.json",
      srt: "teaser.srt",
      vtt: "teaser.vtt",
      "render-script": "render.sh",
    };
    const url = URL.createObjectURL(new Blob([bytes as BlobPart]));
    const anchor = h("a", { href: url, download: names[kind] }) as HTMLAnchorElement;
    document.body.append(anchor);
    anchor.click();
    anchor.remove();
    URL.revokeObjectURL(url);
  }
}
