/** Per-tab session state: active version, what-if toggles, snapshot cache.
 *
 * The server stays stateless about sessions; everything here travels in
 * request bodies.  Explanation snapshots are cached per (version, video) so
 * switching versions can never bleed one version's numbers into another.
 */

import type { Explanation } from "./types.js";

export interface PendingEdit {
  class_index: number;
  concept_index: number;
  value: number;
}

export class SessionStore {
  activeVersion = "v1";
  baselineVersion: string | null = null;
  selectedVideo: string | null = null;
  deactivated = new Set<number>();
  pendingEdits: PendingEdit[] = [];

  private snapshots = new Map<string, Map<string, Explanation>>();

  toggleConcept(index: number): boolean {
    if (this.deactivated.has(index)) {
      this.deactivated.delete(index);
      return false;
    }
    this.deactivated.add(index);
    return true;
  }

  /** Drop deactivated indices that fall outside the version's concept space. */
  validateDeactivated(numConcepts: number): void {
    for (const index of [...this.deactivated]) {
      if (index < 0 || index >= numConcepts) this.deactivated.delete(index);
    }
  }

  switchVersion(version: string, numConcepts: number): void {
    this.activeVersion = version;
    this.validateDeactivated(numConcepts);
  }

  rememberExplanation(version: string, video: string, explanation: Explanation): void {
    if (!this.snapshots.has(version)) this.snapshots.set(version, new Map());
    this.snapshots.get(version)!.set(video, explanation);
  }

  snapshotFor(version: string, video: string): Explanation | undefined {
    return this.snapshots.get(version)?.get(video);
  }
}
