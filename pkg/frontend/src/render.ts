// String-based rendering helpers. Views are pure functions from payload
// to HTML text so they can be tested without a browser.

export function esc(value: unknown): string {
  return String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

// Numbers are displayed exactly as the API sent them (pass-through
// fidelity); presentation-only geometry may round.
export function num(value: number | null): string {
  return value === null ? "—" : esc(value);
}

export function attr(name: string, value: string): string {
  return `${name}="${esc(value)}"`;
}
