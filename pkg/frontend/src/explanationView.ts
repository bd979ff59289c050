/** Explanation panel: prediction card, class distribution, contribution bars.
 *
 * Items arrive from the server already ordered by |contribution|; the view
 * renders them as-is.  Motion items embed a stick-figure preview built from
 * the medoid payload; object/scene items render as text chips.
 */

import { fmt, fmtPercent } from "./format.js";
import { buildAnimation, COCO17_EDGES } from "./skeleton.js";
import type { Explanation, ExplanationItem } from "./types.js";
import { h, VNode } from "./vdom.js";

const VIEWPORT = { width: 120, height: 120, pad: 8 };

export interface ExplanationHandlers {
  onToggle?: (conceptIndex: number) => void;
  edges?: [number, number][];
}

function stickFigure(item: ExplanationItem, edges: [number, number][]): VNode {
  const medoid = item.medoid!;
  const anim = buildAnimation(medoid.coords, VIEWPORT, edges);
  const first = anim.frames[0];
  const lines = first.segments.map((s) =>
    h("line", {
      x1: fmt(s.x1, 2), y1: fmt(s.y1, 2), x2: fmt(s.x2, 2), y2: fmt(s.y2, 2),
      class: "bone",
    }),
  );
  const joints = first.joints.map(([x, y]) =>
    h("circle", { cx: fmt(x, 2), cy: fmt(y, 2), r: "2", class: "joint" }),
  );
  return h(
    "svg",
    {
      class: "stick-figure",
      width: String(VIEWPORT.width),
      height: String(VIEWPORT.height),
      "data-frames": String(anim.frameCount),
      "data-joints": String(anim.jointCount),
      "data-source": `${medoid.video_id}/${medoid.clip_index}`,
    },
    [...lines, ...joints],
  );
}

function contributionBar(item: ExplanationItem, maxAbs: number, handlers: ExplanationHandlers): VNode {
  const widthPct = maxAbs > 0 ? (Math.abs(item.contribution) / maxAbs) * 100 : 0;
  const edges = handlers.edges ?? COCO17_EDGES;
  const visual =
    item.kind === "motion" && item.medoid
      ? stickFigure(item, edges)
      : h("span", { class: `chip kind-${item.kind}` }, [item.name]);
  return h(
    "div",
    {
      class: `contribution-item kind-${item.kind}`,
      "data-concept": String(item.concept_index),
      "data-contribution": fmt(item.contribution),
    },
    [
      h("div", { class: "item-head" }, [
        h("span", { class: "concept-name" }, [item.name]),
        h("span", { class: "concept-kind" }, [item.kind]),
        h(
          "button",
          { class: "toggle", "data-concept": String(item.concept_index) },
          ["deactivate"],
          handlers.onToggle ? { click: () => handlers.onToggle!(item.concept_index) } : {},
        ),
      ]),
      h("div", { class: "bar-track" }, [
        h("div", {
          class: `bar ${item.contribution >= 0 ? "positive" : "negative"}`,
          style: `width: ${widthPct.toFixed(1)}%`,
        }),
      ]),
      h("div", { class: "item-numbers" }, [
        h("span", { class: "activation" }, [`activation ${fmt(item.activation)}`]),
        h("span", { class: "weight" }, [`weight ${fmt(item.weight)}`]),
        h("span", { class: "contribution" }, [`contribution ${fmt(item.contribution)}`]),
      ]),
      visual,
    ],
  );
}

export function renderExplanation(
  explanation: Explanation,
  classNames: string[],
  handlers: ExplanationHandlers = {},
): VNode {
  const maxAbs = Math.max(...explanation.items.map((i) => Math.abs(i.contribution)), 0);
  const header = h("div", { class: "prediction-card" }, [
    h("h2", {}, [
      `${explanation.video_id}: ${explanation.predicted_class_name}`,
    ]),
    h("span", { class: "confidence" }, [
      `p = ${fmt(explanation.class_distribution[explanation.predicted_class])}`,
    ]),
    h("span", { class: "predicted-logit", "data-class": String(explanation.predicted_class) }, [
      `logit ${fmt(explanation.logits[explanation.predicted_class])}`,
    ]),
  ]);
  const distribution = h(
    "ul",
    { class: "class-distribution" },
    explanation.class_distribution.map((p, c) =>
      h("li", { class: c === explanation.predicted_class ? "top" : "", "data-class": String(c) }, [
        `${classNames[c] ?? `class ${c}`}: ${fmtPercent(p)} (logit ${fmt(explanation.logits[c])})`,
      ]),
    ),
  );
  const deactivatedNote =
    explanation.deactivated.length > 0
      ? h("div", { class: "deactivated-note" }, [
          `deactivated concepts: ${explanation.deactivated.join(", ")}`,
        ])
      : h("div", { class: "deactivated-note empty" }, []);
  return h("section", { class: "explanation-view" }, [
    header,
    distribution,
    deactivatedNote,
    h(
      "div",
      { class: "contribution-list" },
      explanation.items.map((item) => contributionBar(item, maxAbs, handlers)),
    ),
  ]);
}
