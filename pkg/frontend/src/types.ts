/** Wire types mirroring the engine server's JSON API. */

export type ConceptKind = "motion" | "object" | "scene";

export interface ModelInfo {
  version: string;
  active: string;
  feature_dim: number;
  num_motion: number;
  num_object: number;
  num_scene: number;
  num_concepts: number;
  num_classes: number;
  class_names: string[];
  lam: number | null;
  alpha: number | null;
}

export interface MedoidPayload {
  video_id: string;
  clip_index: number;
  /** L x J x 2 keypoint trajectory in the normalized display frame. */
  coords: number[][][];
}

export interface ConceptInfo {
  index: number;
  kind: ConceptKind;
  name: string;
  medoid: MedoidPayload | null;
}

export interface ExplanationItem {
  concept_index: number;
  kind: ConceptKind;
  name: string;
  activation: number;
  weight: number;
  contribution: number;
  medoid: MedoidPayload | null;
}

export interface Explanation {
  video_id: string;
  predicted_class: number;
  predicted_class_name: string;
  class_distribution: number[];
  logits: number[];
  bias: number;
  items: ExplanationItem[];
  deactivated: number[];
}

export interface SankeyNode {
  concept_index: number;
  kind: ConceptKind;
  name: string;
  shared: boolean;
}

export interface SankeyEdge {
  concept_index: number;
  class_index: number;
  weight: number;
}

export interface SankeyData {
  class_a: number;
  class_b: number;
  concept_nodes: SankeyNode[];
  edges: SankeyEdge[];
}

export interface Metrics {
  accuracy: number;
  per_class_accuracy: (number | null)[];
  confusion: number[][];
  num_videos: number;
}

export interface Report {
  fixed: number;
  broken: number;
  accuracy_before: number;
  accuracy_after: number;
  net_delta: number;
  flips: { video_id: string; label: number; before: number; after: number }[];
}

export interface VideoEntry {
  id: string;
  label: number;
  class_name: string;
}

export interface VersionEntry {
  id: string;
  parent: string | null;
  edits: number;
}
