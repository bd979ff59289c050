/** Class-pair weight diagram: concepts on the left, the two classes on the
 * right, edge thickness proportional to |weight|.  Shared concepts are
 * grouped in a middle band, class-exclusive ones above and below.
 */

import { fmt } from "./format.js";
import type { SankeyData } from "./types.js";
import { h, VNode } from "./vdom.js";

const WIDTH = 420;
const ROW = 26;
const PAD = 20;
const MAX_STROKE = 8;

export function renderSankey(data: SankeyData, classNames: string[]): VNode {
  const exclusiveA = data.concept_nodes.filter(
    (n) => !n.shared && data.edges.some((e) => e.concept_index === n.concept_index && e.class_index === data.class_a),
  );
  const shared = data.concept_nodes.filter((n) => n.shared);
  const exclusiveB = data.concept_nodes.filter((n) => !n.shared && !shared.includes(n) && !exclusiveA.includes(n));
  // exclusive-to-a first, the shared group in the middle, exclusive-to-b last
  const ordered = [
    ...exclusiveA.filter((n) => topClassOf(n.concept_index, data) === data.class_a),
    ...shared,
    ...exclusiveA.filter((n) => topClassOf(n.concept_index, data) !== data.class_a),
    ...exclusiveB,
  ];
  const unique = [...new Map(ordered.map((n) => [n.concept_index, n])).values()];
  const height = Math.max(unique.length, 2) * ROW + 2 * PAD;
  const yOf = new Map(unique.map((n, i) => [n.concept_index, PAD + (i + 0.5) * ROW]));
  const classY = new Map([
    [data.class_a, PAD + height * 0.25],
    [data.class_b, PAD + height * 0.65],
  ]);
  const maxWeight = Math.max(...data.edges.map((e) => Math.abs(e.weight)), 1e-12);

  const nodeEls = unique.map((n) =>
    h("g", { class: `concept-node ${n.shared ? "shared" : "exclusive"}`, "data-concept": String(n.concept_index) }, [
      h("circle", { cx: String(PAD), cy: fmt(yOf.get(n.concept_index)!, 1), r: "4", class: `kind-${n.kind}` }),
      h("text", { x: String(PAD + 8), y: fmt(yOf.get(n.concept_index)! + 4, 1) }, [n.name]),
    ]),
  );
  const classEls = [data.class_a, data.class_b].map((c) =>
    h("g", { class: "class-node", "data-class": String(c) }, [
      h("rect", { x: String(WIDTH - 110), y: fmt(classY.get(c)! - 10, 1), width: "100", height: "20" }),
      h("text", { x: String(WIDTH - 105), y: fmt(classY.get(c)! + 4, 1) }, [classNames[c] ?? `class ${c}`]),
    ]),
  );
  const edgeEls = data.edges.map((e) =>
    h("line", {
      class: `weight-edge ${e.weight >= 0 ? "positive" : "negative"}`,
      "data-concept": String(e.concept_index),
      "data-class": String(e.class_index),
      "data-weight": fmt(e.weight),
      x1: String(PAD + 6),
      y1: fmt(yOf.get(e.concept_index)!, 1),
      x2: String(WIDTH - 112),
      y2: fmt(classY.get(e.class_index)!, 1),
      "stroke-width": fmt(Math.max((Math.abs(e.weight) / maxWeight) * MAX_STROKE, 0.3), 2),
    }),
  );

  return h(
    "svg",
    { class: "sankey-view", width: String(WIDTH), height: String(height) },
    [...edgeEls, ...nodeEls, ...classEls],
  );
}

function topClassOf(conceptIndex: number, data: SankeyData): number {
  const pair = data.edges.filter((e) => e.concept_index === conceptIndex);
  pair.sort((a, b) => Math.abs(b.weight) - Math.abs(a.weight));
  return pair[0]?.class_index ?? data.class_a;
}
