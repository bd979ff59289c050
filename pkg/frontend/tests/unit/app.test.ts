import { describe, expect, it } from "vitest";

import { ApiClient, FetchLike } from "../../src/api.js";
import { App } from "../../src/app.js";
import { renderExplanation } from "../../src/explanationView.js";
import { SessionStore } from "../../src/state.js";
import { texts } from "../../src/vdom.js";
import { conceptsFixture, explanationFixture, reportFixture } from "../fixtures.js";

type Route = (body: unknown, url: URL) => unknown;

function stubFetch(routes: Record<string, Route>, log: { url: string; body: unknown }[] = []): FetchLike {
  return async (url, init) => {
    const parsed = new URL(url, "http://stub");
    const key = `${init?.method ?? "GET"} ${parsed.pathname}`;
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    log.push({ url: String(url), body });
    const route = routes[key];
    if (!route) {
      return new Response(JSON.stringify({ code: "not_found", message: key }), { status: 404 });
    }
    return new Response(JSON.stringify(route(body, parsed)), { status: 200 });
  };
}

const MODEL = {
  version: "v1",
  active: "v1",
  feature_dim: 8,
  num_motion: 2,
  num_object: 1,
  num_scene: 1,
  num_concepts: 16,
  num_classes: 4,
  class_names: ["class_0", "class_1", "class_2", "class_3"],
  lam: 0.002,
  alpha: 0.99,
};

function makeApp(routes: Record<string, Route>, log: { url: string; body: unknown }[] = []): App {
  const base: Record<string, Route> = {
    "GET /model": () => MODEL,
    "GET /concepts": () => ({ version: "v1", concepts: conceptsFixture() }),
    ...routes,
  };
  return new App(new ApiClient("http://stub", stubFetch(base, log)), new SessionStore());
}

describe("app controller", () => {
  it("sends the deactivated set with every explain request", async () => {
    const log: { url: string; body: unknown }[] = [];
    const app = makeApp(
      { "POST /explain": () => ({ version: "v1", explanation: explanationFixture() }) },
      log,
    );
    await app.load();
    await app.explain("v0042");
    await app.toggleConcept(9);
    const explainBodies = log.filter((l) => l.url.endsWith("/explain")).map((l) => l.body) as {
      deactivated: number[];
    }[];
    expect(explainBodies[0].deactivated).toEqual([]);
    expect(explainBodies[1].deactivated).toEqual([9]);
  });

  it("leaves the prediction card unchanged when toggling a zero-weight concept", async () => {
    // the server returns the same numbers since the concept carried no weight
    const app = makeApp({ "POST /explain": () => ({ version: "v1", explanation: explanationFixture() }) });
    await app.load();
    const before = await app.explain("v0042");
    const after = await app.toggleConcept(15);
    const cardBefore = texts(renderExplanation(before, MODEL.class_names));
    const cardAfter = texts(renderExplanation(after, MODEL.class_names));
    expect(cardAfter).toEqual(cardBefore);
  });

  it("snapshots explanations only for the untoggled state", async () => {
    const app = makeApp({ "POST /explain": () => ({ version: "v1", explanation: explanationFixture() }) });
    await app.load();
    await app.explain("v0042");
    expect(app.store.snapshotFor("v1", "v0042")).toBeDefined();
    app.store.toggleConcept(2);
    await app.explain("v0099");
    expect(app.store.snapshotFor("v1", "v0099")).toBeUndefined();
  });

  it("weight edits create a new active version and keep the old as baseline", async () => {
    let counter = 1;
    const app = makeApp({
      "POST /intervene/class": () => ({ version: `v${++counter}` }),
    });
    await app.load();
    const version = await app.applyEdit(0, 2, 1.0);
    expect(version).toBe("v2");
    expect(app.store.activeVersion).toBe("v2");
    expect(app.store.baselineVersion).toBe("v1");
  });

  it("reverting to the baseline restores the pre-edit snapshot untouched", async () => {
    const preEdit = explanationFixture();
    let counter = 1;
    const app = makeApp({
      "POST /explain": () => ({ version: "v1", explanation: preEdit }),
      "POST /intervene/class": () => ({ version: `v${++counter}` }),
    });
    await app.load();
    await app.explain("v0042");
    await app.applyEdit(1, 2, 1.0);
    app.switchVersion("v1");
    expect(app.store.snapshotFor(app.store.activeVersion, "v0042")).toEqual(preEdit);
  });

  it("report flow exposes the server's fixed/broken verbatim", async () => {
    let counter = 1;
    const report = reportFixture();
    const log: { url: string; body: unknown }[] = [];
    const app = makeApp(
      {
        "POST /intervene/class": () => ({ version: `v${++counter}` }),
        "POST /report": () => ({ before: "v1", after: "v2", report }),
      },
      log,
    );
    await app.load();
    await app.applyEdit(0, 1, 1.0);
    const got = await app.report("test");
    expect(got).toEqual(report);
    const reportBody = log.find((l) => l.url.endsWith("/report"))!.body as { before: string; after: string };
    expect(reportBody.before).toBe("v1");
    expect(reportBody.after).toBe("v2");
  });

  it("refuses a report without a distinct baseline", async () => {
    const app = makeApp({});
    await app.load();
    await expect(app.report("test")).rejects.toThrow(/baseline/);
  });
});
