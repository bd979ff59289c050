import { describe, expect, it } from "vitest";

import { buildAnimation, COCO17_EDGES, frameSegments, project } from "../../src/skeleton.js";
import { medoid } from "../fixtures.js";

const VP = { width: 120, height: 120, pad: 8 };

describe("skeleton geometry", () => {
  it("uses the 17-keypoint edge convention", () => {
    expect(COCO17_EDGES).toHaveLength(16);
    for (const [a, b] of COCO17_EDGES) {
      expect(a).toBeGreaterThanOrEqual(0);
      expect(b).toBeLessThan(17);
    }
  });

  it("projects every joint inside the padded viewport", () => {
    const coords = medoid(5, 17).coords;
    for (let f = 0; f < 5; f++) {
      for (const [x, y] of project(coords, f, VP)) {
        expect(x).toBeGreaterThanOrEqual(0);
        expect(x).toBeLessThanOrEqual(VP.width);
        expect(y).toBeGreaterThanOrEqual(0);
        expect(y).toBeLessThanOrEqual(VP.height);
      }
    }
  });

  it("emits one segment per applicable edge", () => {
    const coords = medoid(3, 17).coords;
    expect(frameSegments(coords, 0, VP)).toHaveLength(COCO17_EDGES.length);
    // fewer joints -> edges referencing missing joints are skipped
    const small = medoid(3, 6).coords;
    const applicable = COCO17_EDGES.filter(([a, b]) => a < 6 && b < 6);
    expect(frameSegments(small, 0, VP)).toHaveLength(applicable.length);
  });

  it("builds an animation with one entry per frame", () => {
    const anim = buildAnimation(medoid(7, 17).coords, VP);
    expect(anim.frameCount).toBe(7);
    expect(anim.jointCount).toBe(17);
    expect(anim.frames).toHaveLength(7);
    expect(anim.frames[3].joints).toHaveLength(17);
  });

  it("accepts a custom edge list from concept metadata", () => {
    const edges: [number, number][] = [[0, 1], [1, 2]];
    const segments = frameSegments(medoid(2, 3).coords, 1, VP, edges);
    expect(segments).toHaveLength(2);
  });
});
