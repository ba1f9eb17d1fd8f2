/**
 * Floor-plan view model: manifest objects mapped to screen rectangles.
 *
 * The mapping matches the service's SVG floor plans exactly: 100 px per
 * meter, y axis flipped so room north is the top edge, positions are bbox
 * centers in meters.
 */

import type { Manifest, ManifestObject, RoomDimensions } from './types';

export const PX_PER_METER = 100;

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface PlanObject {
  id: string;
  name: string;
  rect: Rect;
  /** Facing tick from the rectangle center, in px. */
  facing: { x1: number; y1: number; x2: number; y2: number };
}

/** Half extents along world x/y in meters; rotation 90/270 swaps the axes. */
export function worldHalfExtents(obj: ManifestObject): [number, number] {
  const [hx, hy] = [obj.bbox[0] / 2, obj.bbox[1] / 2];
  return obj.rotation % 180 === 90 ? [hy, hx] : [hx, hy];
}

function toPx(x: number, y: number, room: RoomDimensions): [number, number] {
  return [x * PX_PER_METER, (room.depth_y - y) * PX_PER_METER];
}

export function objectRect(obj: ManifestObject, room: RoomDimensions): Rect {
  const [hx, hy] = worldHalfExtents(obj);
  const [cx, cy] = obj.position;
  const [x, y] = toPx(cx - hx, cy + hy, room);
  return { x, y, width: 2 * hx * PX_PER_METER, height: 2 * hy * PX_PER_METER };
}

const FACING_DIR: Record<number, [number, number]> = {
  0: [0, 1],
  90: [1, 0],
  180: [0, -1],
  270: [-1, 0],
};

export function planObjects(manifest: Manifest): PlanObject[] {
  // Paint order: lower objects first, so items resting on others draw on
  // top and win hit-testing.
  const byHeight = [...manifest.objects].sort(
    (a, b) => a.position[2] - b.position[2] || a.id.localeCompare(b.id),
  );
  return byHeight.map((obj) => {
    const rect = objectRect(obj, manifest.room);
    const [cx, cy] = toPx(obj.position[0], obj.position[1], manifest.room);
    const [hx, hy] = worldHalfExtents(obj);
    const [dx, dy] = FACING_DIR[obj.rotation % 360] ?? [0, 1];
    const tick = 0.6 * Math.min(hx, hy) * PX_PER_METER;
    return {
      id: obj.id,
      name: obj.name,
      rect,
      facing: { x1: cx, y1: cy, x2: cx + dx * tick, y2: cy - dy * tick },
    };
  });
}

/** Topmost object under a screen point, for hover/selection. */
export function hitTest(objects: readonly PlanObject[], x: number, y: number): string | null {
  for (let i = objects.length - 1; i >= 0; i -= 1) {
    const { rect } = objects[i];
    if (x >= rect.x && x <= rect.x + rect.width && y >= rect.y && y <= rect.y + rect.height) {
      return objects[i].id;
    }
  }
  return null;
}

export interface MovedObject {
  id: string;
  before: Rect | null;
  after: Rect | null;
  /** Largest per-corner displacement in px; Infinity for added/removed. */
  distancePx: number;
}

/** Objects whose rectangle moved more than tolerancePx between two plans. */
export function diffMovedObjects(
  before: Manifest,
  after: Manifest,
  tolerancePx = 0.5,
): MovedObject[] {
  const beforeRects = new Map(before.objects.map((o) => [o.id, objectRect(o, before.room)]));
  const afterRects = new Map(after.objects.map((o) => [o.id, objectRect(o, after.room)]));
  const moved: MovedObject[] = [];
  for (const id of new Set([...beforeRects.keys(), ...afterRects.keys()])) {
    const a = beforeRects.get(id) ?? null;
    const b = afterRects.get(id) ?? null;
    if (!a || !b) {
      moved.push({ id, before: a, after: b, distancePx: Infinity });
      continue;
    }
    const distancePx = Math.max(
      Math.abs(a.x - b.x),
      Math.abs(a.y - b.y),
      Math.abs(a.x + a.width - b.x - b.width),
      Math.abs(a.y + a.height - b.y - b.height),
    );
    if (distancePx > tolerancePx) {
      moved.push({ id, before: a, after: b, distancePx });
    }
  }
  return moved.sort((lhs, rhs) => lhs.id.localeCompare(rhs.id));
}

const RECT_PATTERN = /<rect class="object" data-id="([^"]+)" x="([^"]+)" y="([^"]+)" width="([^"]+)" height="([^"]+)"/g;

/** Object rectangles from a service floorplan.svg, keyed by node id. */
export function parseSvgRects(svg: string): Map<string, Rect> {
  const out = new Map<string, Rect>();
  for (const match of svg.matchAll(RECT_PATTERN)) {
    out.set(match[1], {
      x: Number(match[2]),
      y: Number(match[3]),
      width: Number(match[4]),
      height: Number(match[5]),
    });
  }
  return out;
}
