import { describe, expect, it } from "vitest";

import { renderExplanation } from "../../src/explanationView.js";
import { fmt } from "../../src/format.js";
import { COCO17_EDGES } from "../../src/skeleton.js";
import { byClass, texts } from "../../src/vdom.js";
import { explanationFixture } from "../fixtures.js";

const CLASS_NAMES = ["class_0", "class_1", "class_2", "class_3"];

describe("explanation view", () => {
  it("renders one bar per item in the server's order", () => {
    const node = renderExplanation(explanationFixture(), CLASS_NAMES);
    const bars = byClass(node, "contribution-item");
    expect(bars).toHaveLength(3);
    expect(bars.map((b) => b.attrs["data-concept"])).toEqual(["2", "9", "13"]);
    // server order is by |contribution| descending; the view must not reorder
    const magnitudes = bars.map((b) => Math.abs(Number(b.attrs["data-contribution"])));
    expect(magnitudes).toEqual([...magnitudes].sort((a, b) => b - a));
  });

  it("scales bar widths by |contribution| relative to the largest item", () => {
    const node = renderExplanation(explanationFixture(), CLASS_NAMES);
    const widths = byClass(node, "bar").map((b) => parseFloat(b.attrs.style.match(/width: ([\d.]+)%/)![1]));
    expect(widths[0]).toBeCloseTo(100.0, 5);
    expect(widths[1]).toBeCloseTo((0.99 / 1.8) * 100, 1);
    expect(widths[2]).toBeCloseTo((0.25 / 1.8) * 100, 1);
  });

  it("renders motion items as stick figures with all frames and joints", () => {
    const node = renderExplanation(explanationFixture(), CLASS_NAMES);
    const figures = byClass(node, "stick-figure");
    expect(figures).toHaveLength(1);
    const svg = figures[0];
    expect(svg.attrs["data-frames"]).toBe("4");
    expect(svg.attrs["data-joints"]).toBe("17");
    const lines = svg.children.filter((c) => typeof c !== "string" && c.tag === "line");
    const circles = svg.children.filter((c) => typeof c !== "string" && c.tag === "circle");
    expect(lines).toHaveLength(COCO17_EDGES.length);
    expect(circles).toHaveLength(17);
  });

  it("renders object and scene items as text chips", () => {
    const node = renderExplanation(explanationFixture(), CLASS_NAMES);
    const chips = byClass(node, "chip");
    expect(chips.map((c) => texts(c).join(""))).toEqual(["tennis racket", "indoor court"]);
    expect(chips[0].attrs.class).toContain("kind-object");
    expect(chips[1].attrs.class).toContain("kind-scene");
  });

  it("forwards toggle clicks with the concept index", () => {
    const toggled: number[] = [];
    const node = renderExplanation(explanationFixture(), CLASS_NAMES, { onToggle: (i) => toggled.push(i) });
    for (const button of byClass(node, "toggle")) button.on.click?.();
    expect(toggled).toEqual([2, 9, 13]);
  });

  it("displays only numbers that come verbatim from the payload", () => {
    const explanation = explanationFixture();
    const node = renderExplanation(explanation, CLASS_NAMES);
    const payloadNumbers = new Set<string>();
    for (const p of explanation.class_distribution) {
      payloadNumbers.add(fmt(p));
      payloadNumbers.add(`${(p * 100).toFixed(1)}%`);
    }
    for (const l of explanation.logits) payloadNumbers.add(fmt(l));
    for (const item of explanation.items) {
      payloadNumbers.add(fmt(item.activation));
      payloadNumbers.add(fmt(item.weight));
      payloadNumbers.add(fmt(item.contribution));
    }
    const displayed = texts(node)
      .flatMap((t) => t.match(/-?\d+\.\d+%?/g) ?? [])
      .filter((t) => t.includes("."));
    expect(displayed.length).toBeGreaterThan(0);
    for (const token of displayed) {
      expect(payloadNumbers.has(token), `displayed ${token} missing from payload`).toBe(true);
    }
  });

  it("lists the applied deactivations", () => {
    const explanation = explanationFixture();
    explanation.deactivated = [2, 9];
    const node = renderExplanation(explanation, CLASS_NAMES);
    const note = byClass(node, "deactivated-note")[0];
    expect(texts(note).join("")).toContain("2, 9");
  });
});
