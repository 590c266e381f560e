import { attr, esc } from "../render.js";
import type { MentorAssignment, RatingSchemaInfo } from "../types.js";

// Mentor rating form for one assignment. Renders only the mentor's own
// sheet (the payload carries nothing else); submit stays disabled until
// every criterion has a score; a closed round disables the whole form.
export function renderRatingForm(
  assignment: MentorAssignment,
  schema: RatingSchemaInfo,
  draft: Record<string, number | undefined>,
): string {
  const closed = assignment.round_status !== "open";
  const parts: string[] = [];
  parts.push(
    `<h2>Rate venture ${esc(assignment.venture_id)} ` +
      `<small>model v${esc(assignment.model.version)}</small></h2>`,
  );
  if (closed) {
    parts.push(`<p class="closed-notice">This round is closed; ratings are read-only.</p>`);
  }
  if (assignment.my_sheet) {
    parts.push(
      `<p class="replace-notice">You already submitted a sheet; saving again replaces it.</p>`,
    );
  }
  parts.push(`<section class="model-summary">`);
  for (const [dim, values] of Object.entries(assignment.model.choices)) {
    parts.push(
      `<div class="model-dim"><b>${esc(dim)}</b>: ${values.map(esc).join(", ")}</div>`,
    );
  }
  for (const [dim, text] of Object.entries(assignment.model.free_text)) {
    if (text) {
      parts.push(`<blockquote ${attr("data-dim", dim)}>${esc(text)}</blockquote>`);
    }
  }
  parts.push(`</section>`);

  let missing = 0;
  for (const criterion of schema.criteria) {
    const value = draft[criterion] ?? assignment.my_sheet?.scores[criterion];
    if (value === undefined) {
      missing += 1;
    }
    parts.push(
      `<div class="criterion"><label>${esc(criterion)} ` +
        `(${esc(schema.scale_min)}–${esc(schema.scale_max)})</label>` +
        `<input type="range" ${attr("name", `crit:${criterion}`)} ` +
        `min="${esc(schema.scale_min)}" max="${esc(schema.scale_max)}" ` +
        `${value === undefined ? "" : `value="${esc(value)}" data-set="1" `}` +
        `${closed ? "disabled " : ""}/>` +
        `<output>${value === undefined ? "—" : esc(value)}</output></div>`,
    );
  }
  parts.push(
    `<h3>Suggestions per business-model dimension</h3>` +
      `<textarea ${attr("name", "qual:overall")} placeholder="Concrete advice…"` +
      `${closed ? " disabled" : ""}></textarea>`,
  );
  const blocked = closed || missing > 0;
  parts.push(
    `<button id="submit-rating"${blocked ? " disabled" : ""}>Submit rating</button>`,
  );
  if (!closed && missing > 0) {
    parts.push(`<p class="submit-note">${missing} criterion score(s) still unset.</p>`);
  }
  return parts.join("\n");
}

export function renderAssignmentList(assignments: MentorAssignment[]): string {
  if (assignments.length === 0) {
    return `<p>No assignments yet.</p>`;
  }
  return (
    `<ul class="assignments">` +
    assignments
      .map(
        (a) =>
          `<li ${attr("data-assignment", a.assignment_id)}>` +
          `${esc(a.venture_id)} — round ${esc(a.round_status)}` +
          `${a.my_sheet ? " (sheet submitted)" : ""}</li>`,
      )
      .join("") +
    `</ul>`
  );
}
