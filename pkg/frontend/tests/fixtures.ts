/** Shared fixtures shaped exactly like server responses. */

import type { ConceptInfo, Explanation, MedoidPayload, Report, SankeyData } from "../src/types.js";

export function medoid(frames = 4, joints = 17): MedoidPayload {
  const coords: number[][][] = [];
  for (let f = 0; f < frames; f++) {
    const frame: number[][] = [];
    for (let j = 0; j < joints; j++) {
      frame.push([Math.sin(f + j) * 0.3 + j * 0.01, Math.cos(f * 0.5 + j) * 0.3]);
    }
    coords.push(frame);
  }
  return { video_id: "v0001", clip_index: 0, coords };
}

export function explanationFixture(): Explanation {
  return {
    video_id: "v0042",
    predicted_class: 1,
    predicted_class_name: "class_1",
    class_distribution: [0.05, 0.8, 0.1, 0.05],
    logits: [-1.25, 2.5, 0.75, -0.5],
    bias: 0.125,
    deactivated: [],
    items: [
      {
        concept_index: 2,
        kind: "motion",
        name: "motion_02",
        activation: 1.5,
        weight: 1.2,
        contribution: 1.8,
        medoid: medoid(),
      },
      {
        concept_index: 9,
        kind: "object",
        name: "tennis racket",
        activation: -1.1,
        weight: 0.9,
        contribution: -0.99,
        medoid: null,
      },
      {
        concept_index: 13,
        kind: "scene",
        name: "indoor court",
        activation: 0.5,
        weight: 0.5,
        contribution: 0.25,
        medoid: null,
      },
    ],
  };
}

export function conceptsFixture(): ConceptInfo[] {
  return [
    { index: 0, kind: "motion", name: "motion_00", medoid: medoid(3, 5) },
    { index: 1, kind: "motion", name: "motion_01", medoid: medoid(3, 5) },
    { index: 2, kind: "object", name: "tennis racket", medoid: null },
    { index: 3, kind: "scene", name: "indoor court", medoid: null },
  ];
}

export function reportFixture(): Report {
  return {
    fixed: 1,
    broken: 0,
    accuracy_before: 0.9,
    accuracy_after: 0.92,
    net_delta: 0.02,
    flips: [{ video_id: "v0003", label: 2, before: 1, after: 2 }],
  };
}

export function sankeyFixture(shared: "none" | "all" | "mixed" = "mixed"): SankeyData {
  const nodes = [
    { concept_index: 0, kind: "motion" as const, name: "motion_00", shared: shared === "all" },
    { concept_index: 1, kind: "object" as const, name: "net", shared: shared !== "none" },
    { concept_index: 2, kind: "scene" as const, name: "court", shared: shared === "all" },
  ];
  return {
    class_a: 0,
    class_b: 1,
    concept_nodes: nodes,
    edges: nodes.flatMap((n) => [
      { concept_index: n.concept_index, class_index: 0, weight: 0.5 * (n.concept_index + 1) },
      { concept_index: n.concept_index, class_index: 1, weight: -0.25 * (n.concept_index + 1) },
    ]),
  };
}
