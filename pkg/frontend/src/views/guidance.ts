import { attr, esc, num } from "../render.js";
import type { GuidanceReport, RatingSchemaInfo } from "../types.js";

// Guidance dashboard. Every figure is the API value verbatim; the only
// client-side arithmetic is presentation geometry (bar widths, trend
// coordinates), never a displayed number.
export function renderGuidance(
  report: GuidanceReport,
  schema: RatingSchemaInfo,
): string {
  const info = report.informative;
  const parts: string[] = [];
  parts.push(
    `<h2>Guidance for ${esc(report.venture_id)} ` +
      `<small>round ${esc(report.round_id)}, ${esc(info.n_sheets)} sheets</small></h2>`,
  );

  parts.push(`<section class="criteria">`);
  for (const [criterion, mean] of Object.entries(info.criterion_means)) {
    const widthPct =
      ((mean - schema.scale_min) / (schema.scale_max - schema.scale_min)) * 100;
    parts.push(
      `<div class="bar-row"><span class="bar-label">${esc(criterion)}</span>` +
        `<span class="bar" style="width:${widthPct.toFixed(1)}%"></span>` +
        `<span class="bar-value">${num(mean)}</span></div>`,
    );
  }
  parts.push(
    `<div class="bar-row composite"><span class="bar-label">composite</span>` +
      `<span class="bar-value">${num(info.composite)}</span></div>`,
  );
  parts.push(`</section>`);

  const tooltip =
    `crowd ${info.crowd_probability} × ${info.weights["crowd"] ?? 0}` +
    (info.machine_available
      ? `; machine ${info.machine_probability} × ${info.weights["machine"] ?? 0}`
      : "");
  parts.push(`<section class="probabilities">`);
  parts.push(
    `<div class="prob" data-kind="crowd">crowd: ` +
      `<b>${num(info.crowd_probability)}</b></div>`,
  );
  if (info.machine_available) {
    parts.push(
      `<div class="prob" data-kind="machine">machine: ` +
        `<b>${num(info.machine_probability)}</b></div>`,
    );
  } else {
    parts.push(
      `<div class="prob unavailable" data-kind="machine">machine: ` +
        `not available yet (no trained model)</div>`,
    );
  }
  parts.push(
    `<div class="prob hybrid" data-kind="hybrid" ${attr("title", tooltip)}>` +
      `hybrid: <b>${num(info.hybrid_probability)}</b></div>`,
  );
  parts.push(
    `<details class="weights"><summary>fusion weights</summary><ul>` +
      Object.entries(info.weights)
        .map(([name, w]) => `<li>${esc(name)}: ${num(w)}</li>`)
        .join("") +
      `</ul></details>`,
  );
  parts.push(`</section>`);

  const dims = Object.keys(report.suggestive);
  if (dims.length === 0) {
    parts.push(
      `<details class="suggestive empty"><summary>Suggestions</summary>` +
        `<p>No qualitative feedback this round.</p></details>`,
    );
  } else {
    parts.push(`<section class="suggestive"><h3>Suggestions</h3>`);
    for (const dim of dims) {
      parts.push(`<h4>${esc(dim)}</h4><ul>`);
      for (const text of report.suggestive[dim]) {
        parts.push(`<li>${esc(text)}</li>`);
      }
      parts.push(`</ul>`);
    }
    parts.push(`</section>`);
  }

  const closedPoints = report.lineage.filter((p) => p.composite !== null);
  parts.push(`<section class="trend"><h3>Round-over-round composite</h3>`);
  if (closedPoints.length === 0) {
    parts.push(`<p>No closed rounds yet.</p>`);
  } else {
    parts.push(renderTrend(closedPoints.map((p) => p.composite as number), schema));
    parts.push(
      `<ol class="trend-points">` +
        closedPoints
          .map((p) => `<li ${attr("data-round", p.round_id)}>${num(p.composite)}</li>`)
          .join("") +
        `</ol>`,
    );
  }
  parts.push(`</section>`);
  return parts.join("\n");
}

function renderTrend(values: number[], schema: RatingSchemaInfo): string {
  const width = 260;
  const height = 60;
  const span = schema.scale_max - schema.scale_min || 1;
  const step = values.length > 1 ? width / (values.length - 1) : 0;
  const points = values
    .map((v, i) => {
      const x = values.length > 1 ? i * step : width / 2;
      const y = height - ((v - schema.scale_min) / span) * height;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  return (
    `<svg viewBox="0 0 ${width} ${height}" class="trend-line" role="img">` +
    `<polyline fill="none" stroke="currentColor" points="${points}"/></svg>`
  );
}
