/** Stick-figure geometry for motion-concept medoids.
 *
 * The default edge list follows the 17-keypoint convention of the upstream
 * pose estimator; servers can override it via concept metadata.
 */

export const COCO17_EDGES: [number, number][] = [
  [0, 1], [0, 2], [1, 3], [2, 4],          // head
  [5, 6],                                   // shoulders
  [5, 7], [7, 9], [6, 8], [8, 10],          // arms
  [5, 11], [6, 12], [11, 12],               // torso
  [11, 13], [13, 15], [12, 14], [14, 16],   // legs
];

export interface Segment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Viewport {
  width: number;
  height: number;
  pad: number;
}

interface Transform {
  scale: number;
  dx: number;
  dy: number;
}

function fitTransform(coords: number[][][], vp: Viewport): Transform {
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  for (const frame of coords) {
    for (const [x, y] of frame) {
      minX = Math.min(minX, x); maxX = Math.max(maxX, x);
      minY = Math.min(minY, y); maxY = Math.max(maxY, y);
    }
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = Math.min((vp.width - 2 * vp.pad) / spanX, (vp.height - 2 * vp.pad) / spanY);
  return {
    scale,
    dx: vp.pad - minX * scale + (vp.width - 2 * vp.pad - spanX * scale) / 2,
    dy: vp.pad - minY * scale + (vp.height - 2 * vp.pad - spanY * scale) / 2,
  };
}

export function project(coords: number[][][], frame: number, vp: Viewport): [number, number][] {
  const t = fitTransform(coords, vp);
  return coords[frame].map(([x, y]) => [x * t.scale + t.dx, y * t.scale + t.dy]);
}

/** Line segments of one frame, one per skeleton edge whose joints exist. */
export function frameSegments(
  coords: number[][][],
  frame: number,
  vp: Viewport,
  edges: [number, number][] = COCO17_EDGES,
): Segment[] {
  const pts = project(coords, frame, vp);
  const segments: Segment[] = [];
  for (const [a, b] of edges) {
    if (a >= pts.length || b >= pts.length) continue;
    segments.push({ x1: pts[a][0], y1: pts[a][1], x2: pts[b][0], y2: pts[b][1] });
  }
  return segments;
}

export interface SkeletonAnimation {
  frameCount: number;
  jointCount: number;
  /** Per-frame precomputed segments and joint positions. */
  frames: { segments: Segment[]; joints: [number, number][] }[];
}

export function buildAnimation(
  coords: number[][][],
  vp: Viewport,
  edges: [number, number][] = COCO17_EDGES,
): SkeletonAnimation {
  const frames = coords.map((_, f) => ({
    segments: frameSegments(coords, f, vp, edges),
    joints: project(coords, f, vp),
  }));
  return { frameCount: coords.length, jointCount: coords[0]?.length ?? 0, frames };
}
