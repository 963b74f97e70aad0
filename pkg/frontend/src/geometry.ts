/** Pixel ↔ plot coordinate mapping and brush gesture conversion.
 *
 * The server renders one canvas spanning all attribute pairs; pair p
 * occupies horizontal u ∈ [-0.5, 1.5] centered between axes p and p+1.
 * No plot math happens here beyond the affine mapping published in the
 * dataset metadata — every rendered pixel still comes from the server.
 */

import type { BrushRegion, DatasetMeta } from './types.js';

export interface PixelPoint {
  x: number;
  y: number;
}

/** Affine canvas geometry derived from /api/dataset/meta extents. */
export class PlotGeometry {
  readonly pairWidth: number;
  readonly height: number;
  readonly margin: number;
  readonly vLo: number;
  readonly vHi: number;
  readonly pairCount: number;

  constructor(meta: DatasetMeta) {
    this.pairWidth = meta.extents.pair_width;
    this.height = meta.extents.height;
    this.margin = meta.extents.margin;
    [this.vLo, this.vHi] = meta.extents.v;
    this.pairCount = meta.pair_count;
  }

  /** Canvas x of plot coordinate u within a pair. */
  xOfU(pair: number, u: number): number {
    return this.margin + (pair + 0.5 + u) * this.pairWidth;
  }

  /** Canvas y of plot coordinate v (y grows downward). */
  yOfV(v: number): number {
    return this.margin + ((this.vHi - v) / (this.vHi - this.vLo)) * this.height;
  }

  uOfX(pair: number, x: number): number {
    return (x - this.margin) / this.pairWidth - pair - 0.5;
  }

  vOfY(y: number): number {
    return this.vHi - ((y - this.margin) / this.height) * (this.vHi - this.vLo);
  }

  /** The pair whose u range contains the canvas x, or null off-canvas. */
  pairAt(x: number): number | null {
    const pair = Math.floor((x - this.margin) / this.pairWidth - 0.5);
    const clamped = Math.min(Math.max(pair, 0), this.pairCount - 1);
    const u = this.uOfX(clamped, x);
    return u >= -0.5 && u <= 1.5 ? clamped : null;
  }

  private clampU(pair: number, x: number): number {
    return Math.min(1.5, Math.max(-0.5, this.uOfX(pair, x)));
  }

  private clampV(y: number): number {
    return Math.min(this.vHi, Math.max(this.vLo, this.vOfY(y)));
  }

  /** Rect region from a drag gesture; null for a degenerate drag. */
  rectFromDrag(pair: number, start: PixelPoint, end: PixelPoint): BrushRegion | null {
    const ua = this.clampU(pair, start.x);
    const ub = this.clampU(pair, end.x);
    const va = this.clampV(start.y);
    const vb = this.clampV(end.y);
    if (ua === ub || va === vb) return null;
    return {
      kind: 'rect',
      pair,
      u0: Math.min(ua, ub),
      u1: Math.max(ua, ub),
      v0: Math.min(va, vb),
      v1: Math.max(va, vb),
    };
  }

  /** Lasso region from a free-form path; null below 3 distinct points. */
  lassoFromPath(pair: number, path: PixelPoint[]): BrushRegion | null {
    const vertices: Array<[number, number]> = [];
    for (const p of path) {
      const u = this.clampU(pair, p.x);
      const v = this.clampV(p.y);
      const last = vertices[vertices.length - 1];
      if (!last || last[0] !== u || last[1] !== v) vertices.push([u, v]);
    }
    if (vertices.length < 3) return null;
    return { kind: 'lasso', pair, vertices };
  }
}
