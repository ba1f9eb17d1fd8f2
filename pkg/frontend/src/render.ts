/**
 * 2D canvas renderer for the floor-plan view model.
 *
 * Drawing goes through the narrow Canvas2D interface below so tests can
 * record calls without a browser; a real CanvasRenderingContext2D satisfies
 * it structurally.
 */

import { PX_PER_METER, planObjects } from './plan';
import type { Manifest } from './types';

export interface Canvas2D {
  save(): void;
  restore(): void;
  scale(x: number, y: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
  font: string;
  textAlign: string;
}

export interface ViewState {
  selectedId: string | null;
  zoom: number;
}

export function drawFloorPlan(ctx: Canvas2D, manifest: Manifest, view: ViewState): void {
  const widthPx = manifest.room.width_x * PX_PER_METER;
  const heightPx = manifest.room.depth_y * PX_PER_METER;

  ctx.save();
  ctx.scale(view.zoom, view.zoom);
  ctx.clearRect(0, 0, widthPx, heightPx);

  ctx.strokeStyle = 'black';
  ctx.lineWidth = 2;
  ctx.strokeRect(0, 0, widthPx, heightPx);

  ctx.font = '10px sans-serif';
  ctx.textAlign = 'center';
  for (const obj of planObjects(manifest)) {
    const selected = obj.id === view.selectedId;
    ctx.fillStyle = selected ? '#f2e3c0' : '#dce6f2';
    ctx.fillRect(obj.rect.x, obj.rect.y, obj.rect.width, obj.rect.height);
    ctx.strokeStyle = selected ? '#a06000' : '#204060';
    ctx.lineWidth = 1;
    ctx.strokeRect(obj.rect.x, obj.rect.y, obj.rect.width, obj.rect.height);

    ctx.strokeStyle = '#c03030';
    ctx.beginPath();
    ctx.moveTo(obj.facing.x1, obj.facing.y1);
    ctx.lineTo(obj.facing.x2, obj.facing.y2);
    ctx.stroke();

    ctx.fillStyle = '#202020';
    ctx.fillText(obj.name, obj.facing.x1, obj.facing.y1);
  }
  ctx.restore();
}
