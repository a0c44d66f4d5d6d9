import type { Pattern, Snapshot } from "../src/types.js";

export function phoneSnapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    id: "s1",
    version: 4,
    phase: "negotiation",
    model_id: "m1",
    matrix_ids: {},
    members: ["u1", "u2"],
    model: {
      name: "phone",
      root: "Phone",
      features: ["Phone", "Screen", "GPS", "Basic", "HD"],
      tree: [
        { feature: "Phone", parent: null, relation: "root" },
        { feature: "Screen", parent: "Phone", relation: "mandatory" },
        { feature: "GPS", parent: "Phone", relation: "optional" },
        { feature: "Basic", parent: "Screen", relation: "alt" },
        { feature: "HD", parent: "Screen", relation: "alt" },
      ],
      groups: [{ parent: "Screen", kind: "alt", members: ["Basic", "HD"] }],
      constraints: [{ id: 1, text: "(not (and Basic GPS))", importance: 2 }],
      text: "model phone\n",
    },
    stated: { u1: { Basic: "include" }, u2: { Basic: "exclude" } },
    predicted: { u1: { GPS: 0.7 }, u2: {} },
    visited: { u1: [], u2: [] },
    decisions: {},
    conflicts: [
      {
        feature: "Basic",
        positions: { u1: "include", u2: "exclude" },
        provenance: { u1: "stated", u2: "stated" },
        status: "open",
        resolved_value: null,
      },
    ],
    proposals: [],
    diagnoses: { complete: null, diagnoses: [] },
    prediction_threshold: 0.5,
    ...overrides,
  };
}

export const BASIC_PATTERNS: Pattern[] = [
  {
    kind: "suggest_alternative",
    feature: "Basic",
    alternative: "GPS",
    text:
      "We shouldn't include the feature Basic since it conflicts with " +
      "constraint c1: (not (and Basic GPS)); the feature GPS could be an alternative",
    evidence: [1],
  },
  {
    kind: "suggest_alternative",
    feature: "Basic",
    alternative: "HD",
    text:
      "We shouldn't include the feature Basic since it conflicts with " +
      "the alt group under Screen; the feature HD could be an alternative",
    evidence: [],
  },
  {
    kind: "cite_constraint",
    feature: "Basic",
    alternative: null,
    text: "Constraint c1 applies to Basic: (not (and Basic GPS))",
    evidence: [1],
  },
  {
    kind: "split_decision",
    feature: "Basic",
    alternative: null,
    text: "defer Basic: mark Unstated and revisit after other decisions",
    evidence: [],
  },
];
