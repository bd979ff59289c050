/** Intervention panel: sample-level concept toggles, class-weight editor,
 * and the evaluate/report flow between two model versions.
 *
 * The fixed/broken counts and accuracies shown here are verbatim from the
 * server's report response.
 */

import { fmt, fmtPercent } from "./format.js";
import type { ConceptInfo, Report } from "./types.js";
import { h, VNode } from "./vdom.js";

export interface InterventionHandlers {
  onToggle?: (conceptIndex: number) => void;
  onEdit?: (classIndex: number, conceptIndex: number, value: number) => void;
  onEvaluate?: () => void;
  onSelectVersion?: (version: string) => void;
}

export interface InterventionState {
  deactivated: Set<number>;
  activeVersion: string;
  baselineVersion: string | null;
  versions: string[];
}

function conceptToggles(concepts: ConceptInfo[], state: InterventionState, handlers: InterventionHandlers): VNode {
  return h(
    "ul",
    { class: "concept-toggles" },
    concepts.map((c) =>
      h("li", { class: `toggle-row kind-${c.kind}`, "data-concept": String(c.index) }, [
        h(
          "input",
          {
            type: "checkbox",
            "data-concept": String(c.index),
            ...(state.deactivated.has(c.index) ? {} : { checked: "checked" }),
          },
          [],
          handlers.onToggle ? { change: () => handlers.onToggle!(c.index) } : {},
        ),
        h("span", { class: "concept-name" }, [c.name]),
        h("span", { class: "concept-kind" }, [c.kind]),
      ]),
    ),
  );
}

function weightEditor(concepts: ConceptInfo[], classNames: string[], handlers: InterventionHandlers): VNode {
  let classIndex = 0;
  let conceptIndex = 0;
  let value = 1.0;
  return h("form", { class: "weight-editor" }, [
    h(
      "select",
      { class: "class-select" },
      classNames.map((name, c) => h("option", { value: String(c) }, [name])),
      { change: (ev) => (classIndex = Number((ev as { target: { value: string } }).target.value)) },
    ),
    h(
      "select",
      { class: "concept-select" },
      concepts.map((c) => h("option", { value: String(c.index) }, [c.name])),
      { change: (ev) => (conceptIndex = Number((ev as { target: { value: string } }).target.value)) },
    ),
    h(
      "input",
      { class: "value-input", type: "number", step: "0.1", value: "1.0" },
      [],
      { change: (ev) => (value = Number((ev as { target: { value: string } }).target.value)) },
    ),
    h(
      "button",
      { class: "apply-edit", type: "button" },
      ["set weight"],
      handlers.onEdit ? { click: () => handlers.onEdit!(classIndex, conceptIndex, value) } : {},
    ),
  ]);
}

function reportCard(report: Report | null): VNode {
  if (!report) return h("div", { class: "report-card empty" }, ["no report yet"]);
  return h("div", { class: "report-card" }, [
    h("span", { class: "fixed" }, [`fixed ${report.fixed}`]),
    h("span", { class: "broken" }, [`broken ${report.broken}`]),
    h("span", { class: "acc-before" }, [`accuracy before ${fmtPercent(report.accuracy_before)}`]),
    h("span", { class: "acc-after" }, [`accuracy after ${fmtPercent(report.accuracy_after)}`]),
    h("span", { class: "net-delta" }, [`net ${fmt(report.net_delta)}`]),
  ]);
}

export function renderInterventionPanel(
  concepts: ConceptInfo[],
  classNames: string[],
  state: InterventionState,
  report: Report | null,
  handlers: InterventionHandlers = {},
): VNode {
  const versionRow = h(
    "div",
    { class: "version-row" },
    state.versions.map((v) =>
      h(
        "button",
        {
          class: `version ${v === state.activeVersion ? "active" : ""} ${v === state.baselineVersion ? "baseline" : ""}`,
          "data-version": v,
        },
        [v],
        handlers.onSelectVersion ? { click: () => handlers.onSelectVersion!(v) } : {},
      ),
    ),
  );
  return h("section", { class: "intervention-panel" }, [
    h("h2", {}, ["interventions"]),
    versionRow,
    conceptToggles(concepts, state, handlers),
    weightEditor(concepts, classNames, handlers),
    h(
      "button",
      { class: "evaluate", type: "button" },
      ["evaluate both versions"],
      handlers.onEvaluate ? { click: () => handlers.onEvaluate!() } : {},
    ),
    reportCard(report),
  ]);
}
