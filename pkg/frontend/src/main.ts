/** Browser bootstrap: wires the panels to a live engine server and animates
 * stick figures.  Everything interesting lives in the pure modules. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { renderExplanation } from "./explanationView.js";
import { renderInterventionPanel } from "./interventionPanel.js";
import { renderSankey } from "./sankeyView.js";
import { buildAnimation, COCO17_EDGES } from "./skeleton.js";
import { SessionStore } from "./state.js";
import type { Explanation } from "./types.js";
import { mount, VNode } from "./vdom.js";

const BASE_URL = (window as unknown as { DANCE_SERVER?: string }).DANCE_SERVER ?? "http://127.0.0.1:8321";

const app = new App(new ApiClient(BASE_URL), new SessionStore());
let versions: string[] = [];

function replaceChildren(el: Element, node: VNode): void {
  el.replaceChildren();
  mount(node, el);
}

function animateStickFigures(root: Element): void {
  root.querySelectorAll<SVGSVGElement>("svg.stick-figure").forEach((svg) => {
    const source = svg.getAttribute("data-source");
    const payload = pendingAnimations.get(source ?? "");
    if (!payload) return;
    const anim = buildAnimation(
      payload,
      { width: 120, height: 120, pad: 8 },
      app.skeletonEdges.length ? app.skeletonEdges : COCO17_EDGES,
    );
    let frame = 0;
    window.setInterval(() => {
      frame = (frame + 1) % anim.frameCount;
      const lines = svg.querySelectorAll("line");
      anim.frames[frame].segments.forEach((s, i) => {
        const line = lines[i];
        if (!line) return;
        line.setAttribute("x1", String(s.x1));
        line.setAttribute("y1", String(s.y1));
        line.setAttribute("x2", String(s.x2));
        line.setAttribute("y2", String(s.y2));
      });
      const circles = svg.querySelectorAll("circle");
      anim.frames[frame].joints.forEach(([x, y], i) => {
        const c = circles[i];
        if (!c) return;
        c.setAttribute("cx", String(x));
        c.setAttribute("cy", String(y));
      });
    }, 120);
  });
}

const pendingAnimations = new Map<string, number[][][]>();

function rememberAnimations(explanation: Explanation): void {
  pendingAnimations.clear();
  for (const item of explanation.items) {
    if (item.medoid) pendingAnimations.set(`${item.medoid.video_id}/${item.medoid.clip_index}`, item.medoid.coords);
  }
}

async function refreshExplanation(videoId: string): Promise<void> {
  const explanation = await app.explain(videoId);
  rememberAnimations(explanation);
  const panel = document.getElementById("explanation")!;
  replaceChildren(
    panel,
    renderExplanation(explanation, app.model?.class_names ?? [], {
      onToggle: (idx) => void app.toggleConcept(idx).then(() => refreshExplanation(videoId)),
      edges: app.skeletonEdges.length ? app.skeletonEdges : undefined,
    }),
  );
  animateStickFigures(panel);
}

async function refreshIntervention(): Promise<void> {
  const panel = document.getElementById("intervention")!;
  replaceChildren(
    panel,
    renderInterventionPanel(
      app.concepts,
      app.model?.class_names ?? [],
      {
        deactivated: app.store.deactivated,
        activeVersion: app.store.activeVersion,
        baselineVersion: app.store.baselineVersion,
        versions,
      },
      app.lastReport,
      {
        onToggle: (idx) => {
          if (app.store.selectedVideo) void app.toggleConcept(idx).then(() => refreshExplanation(app.store.selectedVideo!));
        },
        onEdit: (cls, concept, value) =>
          void app.applyEdit(cls, concept, value).then(async () => {
            versions = (await app.api.versions()).versions.map((v) => v.id);
            await refreshIntervention();
          }),
        onEvaluate: () => void app.report("test").then(refreshIntervention),
        onSelectVersion: (v) => {
          app.switchVersion(v);
          void refreshIntervention();
          if (app.store.selectedVideo) void refreshExplanation(app.store.selectedVideo);
        },
      },
    ),
  );
}

async function refreshSankey(): Promise<void> {
  if (!app.model || app.model.num_classes < 2) return;
  const data = await app.sankey(0, 1, 5);
  replaceChildren(document.getElementById("sankey")!, renderSankey(data, app.model.class_names));
}

async function start(): Promise<void> {
  await app.load();
  versions = (await app.api.versions()).versions.map((v) => v.id);
  const videos = await app.videos("test");
  const picker = document.getElementById("videos")!;
  videos.forEach((v) => {
    const btn = document.createElement("button");
    btn.textContent = `${v.id} (${v.class_name})`;
    btn.addEventListener("click", () => void refreshExplanation(v.id));
    picker.appendChild(btn);
  });
  await refreshIntervention();
  await refreshSankey();
  if (videos.length > 0) await refreshExplanation(videos[0].id);
}

void start();
