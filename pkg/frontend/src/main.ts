import { ApiError, Client } from "./api.js";
import type { Choices, MentorAssignment, Taxonomy, ValidationFinding } from "./types.js";
import { allDimensions, toggleChoice, validateChoices } from "./validate.js";
import { renderEditor, renderOfflineBanner, renderSavedBanner } from "./views/editor.js";
import { renderGuidance } from "./views/guidance.js";
import { renderAssignmentList, renderRatingForm } from "./views/rating.js";

// Hash-routed single-page shell: #/editor (entrepreneur), #/mentor,
// #/guidance. The server is the only source of computed numbers; this
// file only wires events, drafts, and fetches.

const DRAFT_KEY = "ventureval-draft";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function loadDraft(): { ventureId: string; choices: Choices } {
  try {
    const raw = localStorage.getItem(DRAFT_KEY);
    if (raw) return JSON.parse(raw);
  } catch {
    /* corrupted draft: start over */
  }
  return { ventureId: "my-venture", choices: {} };
}

function saveDraft(draft: { ventureId: string; choices: Choices }): void {
  localStorage.setItem(DRAFT_KEY, JSON.stringify(draft));
}

class App {
  private client: Client;
  private taxonomy: Taxonomy | null = null;
  private draft = loadDraft();
  private serverFindings: ValidationFinding[] = [];
  private ratingDrafts = new Map<string, Record<string, number>>();

  constructor() {
    const base = localStorage.getItem("ventureval-base") ?? window.location.origin;
    const token = localStorage.getItem("ventureval-token") ?? "";
    this.client = new Client(base, token);
  }

  async start(): Promise<void> {
    window.addEventListener("hashchange", () => void this.route());
    el("token-form").addEventListener("submit", (ev) => {
      ev.preventDefault();
      const token = (el("token-input") as HTMLInputElement).value.trim();
      localStorage.setItem("ventureval-token", token);
      window.location.reload();
    });
    await this.route();
  }

  private async route(): Promise<void> {
    const view = window.location.hash.replace(/^#\//, "") || "editor";
    const main = el("view");
    try {
      if (view === "editor") {
        await this.showEditor(main);
      } else if (view === "mentor") {
        await this.showMentor(main);
      } else if (view === "guidance") {
        await this.showGuidance(main);
      } else {
        main.innerHTML = `<p>Unknown view.</p>`;
      }
    } catch (err) {
      if (err instanceof ApiError) {
        main.innerHTML = `<p class="error">Server said ${err.status}: ${JSON.stringify(
          err.detail,
        )}</p>`;
      } else {
        main.innerHTML = renderOfflineBanner();
      }
    }
  }

  private async ensureTaxonomy(): Promise<Taxonomy> {
    if (!this.taxonomy) {
      this.taxonomy = await this.client.taxonomy();
    }
    return this.taxonomy;
  }

  private async showEditor(main: HTMLElement): Promise<void> {
    const taxonomy = await this.ensureTaxonomy();
    main.innerHTML = renderEditor(taxonomy, this.draft.choices, this.serverFindings);
    main.querySelectorAll("input[type=radio], input[type=checkbox]").forEach((node) => {
      node.addEventListener("change", (ev) => {
        const input = ev.target as HTMLInputElement;
        const dimName = input.name.replace(/^dim:/, "");
        const dim = allDimensions(taxonomy).find((d) => d.name === dimName);
        if (!dim) return;
        this.draft.choices[dimName] = toggleChoice(
          dim,
          this.draft.choices[dimName] ?? [],
          input.value,
        );
        this.serverFindings = [];
        saveDraft(this.draft);
        void this.showEditor(main);
      });
    });
    const submit = main.querySelector("#submit-model");
    submit?.addEventListener("click", async () => {
      if (validateChoices(taxonomy, this.draft.choices).length > 0) {
        return; // button should be disabled anyway
      }
      try {
        const result = await this.client.putModel(this.draft.ventureId, {
          choices: this.draft.choices,
          free_text: {},
        });
        main.insertAdjacentHTML(
          "afterbegin",
          renderSavedBanner(result.venture_id, result.version),
        );
      } catch (err) {
        if (err instanceof ApiError && err.status === 404) {
          const created = await this.client.createVenture(
            this.draft.ventureId,
            [],
            { choices: this.draft.choices, free_text: {} },
          );
          main.insertAdjacentHTML(
            "afterbegin",
            renderSavedBanner(created.venture_id, created.version),
          );
        } else if (err instanceof ApiError && err.status === 422) {
          this.serverFindings =
            (err.detail as { findings?: ValidationFinding[] })?.findings ?? [];
          void this.showEditor(main);
        } else {
          main.insertAdjacentHTML("afterbegin", renderOfflineBanner());
        }
      }
    });
  }

  private async showMentor(main: HTMLElement): Promise<void> {
    const [assignments, schemas] = await Promise.all([
      this.client.myAssignments(),
      this.client.schemas(),
    ]);
    main.innerHTML = `<h2>My assignments</h2>` + renderAssignmentList(assignments);
    main.querySelectorAll("li[data-assignment]").forEach((node) => {
      node.addEventListener("click", () => {
        const id = (node as HTMLElement).dataset.assignment!;
        const assignment = assignments.find((a) => a.assignment_id === id)!;
        this.showRatingForm(main, assignment, schemas[assignment.schema]);
      });
    });
  }

  private showRatingForm(
    main: HTMLElement,
    assignment: MentorAssignment,
    schema: { criteria: string[]; scale_min: number; scale_max: number },
  ): void {
    const draft = this.ratingDrafts.get(assignment.assignment_id) ?? {};
    main.innerHTML = renderRatingForm(assignment, schema, draft);
    main.querySelectorAll("input[type=range]").forEach((node) => {
      node.addEventListener("change", (ev) => {
        const input = ev.target as HTMLInputElement;
        draft[input.name.replace(/^crit:/, "")] = Number(input.value);
        this.ratingDrafts.set(assignment.assignment_id, draft);
        this.showRatingForm(main, assignment, schema);
      });
    });
    main.querySelector("#submit-rating")?.addEventListener("click", async () => {
      const qualitative: Record<string, string> = {};
      const box = main.querySelector("textarea[name='qual:overall']") as
        | HTMLTextAreaElement
        | null;
      if (box && box.value.trim()) {
        qualitative["Overall"] = box.value.trim();
      }
      await this.client.postRating(assignment.assignment_id, {
        scores: { ...assignment.my_sheet?.scores, ...draft },
        qualitative,
      });
      void this.showMentor(main);
    });
  }

  private async showGuidance(main: HTMLElement): Promise<void> {
    const schemas = await this.client.schemas();
    const report = await this.client.guidance(this.draft.ventureId);
    main.innerHTML = renderGuidance(report, schemas[report.schema]);
  }
}

new App().start().catch((err) => {
  el("view").innerHTML = `<p class="error">${String(err)}</p>`;
});
