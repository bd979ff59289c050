/** Controller tying the API client to session state. Views stay pure; every
 * number they display originates in a response handled here. */

import { ApiClient } from "./api.js";
import { SessionStore } from "./state.js";
import type { ConceptInfo, Explanation, Metrics, ModelInfo, Report, SankeyData, VideoEntry } from "./types.js";

export class App {
  model: ModelInfo | null = null;
  concepts: ConceptInfo[] = [];
  /** Skeleton edge list from concept metadata; empty means use the default. */
  skeletonEdges: [number, number][] = [];
  lastReport: Report | null = null;

  constructor(
    readonly api: ApiClient,
    readonly store: SessionStore,
    readonly topK = 3,
  ) {}

  async load(): Promise<void> {
    this.model = await this.api.model();
    this.store.activeVersion = this.model.active;
    this.store.baselineVersion = this.model.active;
    const meta = await this.api.concepts(this.model.version);
    this.concepts = meta.concepts;
    this.skeletonEdges = meta.skeletonEdges;
  }

  videos(split: string): Promise<VideoEntry[]> {
    return this.api.videos(split);
  }

  /** Explain the selected video under the current what-if toggles. */
  async explain(videoId: string): Promise<Explanation> {
    this.store.selectedVideo = videoId;
    const explanation = await this.api.explain(
      videoId,
      this.topK,
      [...this.store.deactivated].sort((a, b) => a - b),
      this.store.activeVersion,
    );
    if (this.store.deactivated.size === 0) {
      this.store.rememberExplanation(this.store.activeVersion, videoId, explanation);
    }
    return explanation;
  }

  /** Toggle one concept and re-query; returns the refreshed explanation. */
  async toggleConcept(conceptIndex: number): Promise<Explanation> {
    if (!this.store.selectedVideo) throw new Error("no video selected");
    this.store.toggleConcept(conceptIndex);
    return this.explain(this.store.selectedVideo);
  }

  /** Apply a class-weight edit; the new version becomes active, the old one
   * stays as the comparison baseline. */
  async applyEdit(classIndex: number, conceptIndex: number, value: number): Promise<string> {
    const parent = this.store.activeVersion;
    const version = await this.api.interveneClassWeight(classIndex, conceptIndex, value, parent);
    this.store.baselineVersion = parent;
    this.store.switchVersion(version, this.model?.num_concepts ?? Infinity);
    return version;
  }

  switchVersion(version: string): void {
    this.store.switchVersion(version, this.model?.num_concepts ?? Infinity);
  }

  async evaluateBoth(split: string): Promise<{ baseline: Metrics | null; active: Metrics }> {
    const active = await this.api.evaluate(split, this.store.activeVersion);
    const baseline =
      this.store.baselineVersion && this.store.baselineVersion !== this.store.activeVersion
        ? await this.api.evaluate(split, this.store.baselineVersion)
        : null;
    return { baseline, active };
  }

  async report(split: string): Promise<Report> {
    if (!this.store.baselineVersion || this.store.baselineVersion === this.store.activeVersion) {
      throw new Error("need a baseline version differing from the active one");
    }
    this.lastReport = await this.api.report(this.store.baselineVersion, this.store.activeVersion, split);
    return this.lastReport;
  }

  sankey(classA: number, classB: number, topN: number): Promise<SankeyData> {
    return this.api.sankey(classA, classB, topN, this.store.activeVersion);
  }
}
