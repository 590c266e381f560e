import type { Choices, Taxonomy, TaxonomyDimension, ValidationFinding } from "./types.js";

export function allDimensions(taxonomy: Taxonomy): TaxonomyDimension[] {
  return taxonomy.layers.flatMap((l) => l.sublayers.flatMap((s) => s.dimensions));
}

// Mirrors the server's 422 semantics so the editor can flag problems
// before submitting (the server remains the authority).
export function validateChoices(taxonomy: Taxonomy, choices: Choices): ValidationFinding[] {
  const findings: ValidationFinding[] = [];
  const known = new Map(allDimensions(taxonomy).map((d) => [d.name, d]));
  for (const name of Object.keys(choices)) {
    if (!known.has(name)) {
      findings.push({
        code: "unknown_dimension",
        dimension: name,
        message: `unknown dimension '${name}'`,
      });
    }
  }
  for (const dim of known.values()) {
    const chosen = choices[dim.name] ?? [];
    if (chosen.length === 0) {
      findings.push({
        code: "missing_dimension",
        dimension: dim.name,
        message: `missing dimension '${dim.name}'`,
      });
      continue;
    }
    for (const c of chosen) {
      if (!dim.characteristics.includes(c)) {
        findings.push({
          code: "unknown_characteristic",
          dimension: dim.name,
          message: `unknown characteristic '${c}' for dimension '${dim.name}'`,
        });
      }
    }
    if (dim.cardinality === "single" && chosen.length !== 1) {
      findings.push({
        code: "cardinality",
        dimension: dim.name,
        message: `dimension '${dim.name}' is single-choice but has ${chosen.length} selections`,
      });
    }
  }
  return findings;
}

// State transition for a click in the editor: single-choice dimensions
// replace their selection, multi-choice toggle membership (never below
// one selection when unchecking the last would empty it is allowed; the
// validator reports the gap instead of silently blocking).
export function toggleChoice(
  dim: TaxonomyDimension,
  current: string[],
  characteristic: string,
): string[] {
  if (dim.cardinality === "single") {
    return [characteristic];
  }
  if (current.includes(characteristic)) {
    return current.filter((c) => c !== characteristic);
  }
  return [...current, characteristic];
}
