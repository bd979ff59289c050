/** Typed client for the engine server; the only source of every displayed number. */

import type {
  ConceptInfo,
  Explanation,
  Metrics,
  ModelInfo,
  Report,
  SankeyData,
  VersionEntry,
  VideoEntry,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body.code ?? "error", body.message ?? "request failed");
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  model(version?: string): Promise<ModelInfo> {
    const suffix = version ? `?version=${encodeURIComponent(version)}` : "";
    return this.request<ModelInfo>(`/model${suffix}`);
  }

  async concepts(version?: string): Promise<{ concepts: ConceptInfo[]; skeletonEdges: [number, number][] }> {
    const suffix = version ? `?version=${encodeURIComponent(version)}` : "";
    const body = await this.request<{ concepts: ConceptInfo[]; skeleton_edges?: [number, number][] }>(
      `/concepts${suffix}`,
    );
    return { concepts: body.concepts, skeletonEdges: body.skeleton_edges ?? [] };
  }

  async videos(split: string): Promise<VideoEntry[]> {
    const body = await this.request<{ videos: VideoEntry[] }>(`/videos?split=${encodeURIComponent(split)}`);
    return body.videos;
  }

  async explain(videoId: string, k: number, deactivated: number[], version?: string): Promise<Explanation> {
    const body = await this.post<{ version: string; explanation: Explanation }>("/explain", {
      video_id: videoId,
      k,
      deactivated,
      version: version ?? null,
    });
    return body.explanation;
  }

  async interveneClassWeight(
    classIndex: number,
    conceptIndex: number,
    value: number,
    version?: string,
  ): Promise<string> {
    const body = await this.post<{ version: string }>("/intervene/class", {
      class_index: classIndex,
      concept_index: conceptIndex,
      value,
      version: version ?? null,
    });
    return body.version;
  }

  async sankey(classA: number, classB: number, topN: number, version?: string): Promise<SankeyData> {
    const params = new URLSearchParams({ class_a: String(classA), class_b: String(classB), top_n: String(topN) });
    if (version) params.set("version", version);
    const body = await this.request<{ sankey: SankeyData }>(`/sankey?${params}`);
    return body.sankey;
  }

  async evaluate(split: string, version?: string): Promise<Metrics> {
    const body = await this.post<{ metrics: Metrics }>("/evaluate", { split, version: version ?? null });
    return body.metrics;
  }

  async report(before: string, after: string, split: string): Promise<Report> {
    const body = await this.post<{ report: Report }>("/report", { before, after, split });
    return body.report;
  }

  async versions(): Promise<{ active: string; versions: VersionEntry[] }> {
    return this.request("/versions");
  }
}
