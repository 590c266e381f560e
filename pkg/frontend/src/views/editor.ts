import { attr, esc } from "../render.js";
import type { Choices, Taxonomy, ValidationFinding } from "../types.js";
import { validateChoices } from "../validate.js";

// Model editor: one control group per dimension, radio buttons where only
// one characteristic may hold, checkboxes where several may. Findings
// (local or echoed back from a server 422) render inline next to the
// dimension they concern.
export function renderEditor(
  taxonomy: Taxonomy,
  choices: Choices,
  serverFindings: ValidationFinding[] = [],
): string {
  const findings = [...validateChoices(taxonomy, choices), ...serverFindings];
  const byDimension = new Map<string, ValidationFinding[]>();
  for (const f of findings) {
    const list = byDimension.get(f.dimension) ?? [];
    list.push(f);
    byDimension.set(f.dimension, list);
  }
  const parts: string[] = [];
  for (const layer of taxonomy.layers) {
    parts.push(`<section class="layer"><h2>${esc(layer.name)}</h2>`);
    for (const sub of layer.sublayers) {
      parts.push(`<fieldset class="sublayer"><legend>${esc(sub.name)}</legend>`);
      for (const dim of sub.dimensions) {
        const chosen = choices[dim.name] ?? [];
        const type = dim.cardinality === "single" ? "radio" : "checkbox";
        const dimFindings = byDimension.get(dim.name) ?? [];
        parts.push(
          `<div class="dimension${dimFindings.length ? " invalid" : ""}" ` +
            `${attr("data-dimension", dim.name)}>` +
            `<h4>${esc(dim.name)} <small>${esc(dim.cardinality)}</small></h4>`,
        );
        for (const c of dim.characteristics) {
          const checked = chosen.includes(c) ? " checked" : "";
          parts.push(
            `<label><input type="${type}" ${attr("name", `dim:${dim.name}`)} ` +
              `${attr("value", c)}${checked}> ${esc(c)}</label>`,
          );
        }
        for (const f of dimFindings) {
          parts.push(`<p class="finding">${esc(f.message)}</p>`);
        }
        parts.push(`</div>`);
      }
      parts.push(`</fieldset>`);
    }
    parts.push(`</section>`);
  }
  const blocked = findings.length > 0;
  parts.push(
    `<button id="submit-model"${blocked ? " disabled" : ""}>Save model version</button>`,
  );
  if (blocked) {
    parts.push(
      `<p class="submit-note">${findings.length} problem(s) to fix before saving.</p>`,
    );
  }
  return parts.join("\n");
}

export function renderSavedBanner(ventureId: string, version: number): string {
  return `<p class="saved">Saved ${esc(ventureId)} as version ${esc(version)}.</p>`;
}

export function renderOfflineBanner(): string {
  return (
    `<p class="offline">Server unreachable — your draft is kept locally; ` +
    `retry when the connection is back.</p>`
  );
}
