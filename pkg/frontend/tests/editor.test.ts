import { describe, expect, it } from "vitest";

import type { Taxonomy } from "../src/types.js";
import { toggleChoice, validateChoices } from "../src/validate.js";
import { renderEditor } from "../src/views/editor.js";

const taxonomy: Taxonomy = {
  name: "mini",
  version: 1,
  feature_width: 7,
  layers: [
    {
      name: "What",
      sublayers: [
        {
          name: "Offer",
          dimensions: [
            {
              name: "Form",
              cardinality: "multi",
              characteristics: ["Goods", "Services"],
            },
            {
              name: "Strategy",
              cardinality: "single",
              characteristics: ["Cheap", "Premium", "Niche"],
            },
          ],
        },
      ],
    },
    {
      name: "Why",
      sublayers: [
        {
          name: "Money",
          dimensions: [
            {
              name: "Revenue Model",
              cardinality: "single",
              characteristics: ["One-Time", "Subscription"],
            },
          ],
        },
      ],
    },
  ],
};

const validChoices = {
  Form: ["Goods", "Services"],
  Strategy: ["Premium"],
  "Revenue Model": ["Subscription"],
};

describe("client-side validation mirrors the server", () => {
  it("accepts a complete legal selection", () => {
    expect(validateChoices(taxonomy, validChoices)).toEqual([]);
  });

  it("flags a second selection in a single-choice dimension", () => {
    const bad = { ...validChoices, Strategy: ["Cheap", "Premium"] };
    const findings = validateChoices(taxonomy, bad);
    expect(findings.some((f) => f.code === "cardinality")).toBe(true);
  });

  it("flags missing dimensions and unknown characteristics", () => {
    const findings = validateChoices(taxonomy, { Strategy: ["Bogus"] });
    const codes = findings.map((f) => f.code);
    expect(codes).toContain("missing_dimension");
    expect(codes).toContain("unknown_characteristic");
  });
});

describe("single-choice selection cannot double up", () => {
  it("replaces instead of accumulating", () => {
    const dim = taxonomy.layers[0].sublayers[0].dimensions[1];
    const next = toggleChoice(dim, ["Cheap"], "Premium");
    expect(next).toEqual(["Premium"]);
  });

  it("multi-choice toggles membership", () => {
    const dim = taxonomy.layers[0].sublayers[0].dimensions[0];
    expect(toggleChoice(dim, ["Goods"], "Services")).toEqual(["Goods", "Services"]);
    expect(toggleChoice(dim, ["Goods", "Services"], "Goods")).toEqual(["Services"]);
  });
});

describe("editor rendering", () => {
  it("uses radios for single-choice and checkboxes for multi-choice", () => {
    const html = renderEditor(taxonomy, validChoices);
    expect(html).toContain('type="radio" name="dim:Strategy"');
    expect(html).toContain('type="checkbox" name="dim:Form"');
  });

  it("marks chosen characteristics and enables submit when valid", () => {
    const html = renderEditor(taxonomy, validChoices);
    expect(html).toContain('value="Premium" checked');
    expect(html).toContain("<button id=\"submit-model\">");
  });

  it("disables submit and shows findings when invalid", () => {
    const html = renderEditor(taxonomy, { Strategy: ["Cheap", "Premium"] });
    expect(html).toContain('id="submit-model" disabled');
    expect(html).toContain("single-choice but has 2");
    expect(html).toContain('class="dimension invalid"');
  });

  it("renders server 422 findings inline at their dimension", () => {
    const html = renderEditor(taxonomy, validChoices, [
      {
        code: "unknown_characteristic",
        dimension: "Revenue Model",
        message: "unknown characteristic 'Blockchain' for dimension 'Revenue Model'",
      },
    ]);
    expect(html).toContain("unknown characteristic &#39;Blockchain&#39;");
    expect(html).toContain('id="submit-model" disabled');
  });
});
