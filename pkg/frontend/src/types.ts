/** Wire types shared with the aupc HTTP service. */

/** A color control point of a 1D transfer function. */
export interface ColorStop {
  /** Normalized density position in [0, 1]. */
  position: number;
  /** RGB components in [0, 1]. */
  rgb: [number, number, number];
}

/** An opacity control point of a 1D transfer function. */
export interface OpacityStop {
  /** Normalized density position in [0, 1]. */
  position: number;
  /** Opacity in [0, 1]. */
  alpha: number;
}

/** A per-pair 1D transfer function, as accepted by /api/render. */
export interface TransferFunctionSpec {
  color_stops: ColorStop[];
  opacity_stops: OpacityStop[];
  /** Density normalization before lookup. */
  mode: 'linear' | 'log';
}

/** Corner-filter settings, as accepted by /api/render. */
export interface CornerSettings {
  window: number;
  /** Metric threshold in [0, 1]. */
  threshold: number;
  /** Mask falloff radius in pixels. */
  radius: number;
  percentile_window: number | null;
  percentile: number;
}

/** An axis-aligned brush rectangle in deformed (u, v) coordinates. */
export interface RectRegion {
  kind: 'rect';
  pair: number;
  u0: number;
  u1: number;
  v0: number;
  v1: number;
}

/** A free-form lasso polygon in deformed (u, v) coordinates. */
export interface LassoRegion {
  kind: 'lasso';
  pair: number;
  vertices: Array<[number, number]>;
}

export type BrushRegion = RectRegion | LassoRegion;

/** Response of GET /api/dataset/meta. */
export interface DatasetMeta {
  attributes: string[];
  row_count: number;
  pair_count: number;
  extents: {
    u: [number, number];
    v: [number, number];
    pair_width: number;
    height: number;
    canvas_width: number;
    canvas_height: number;
    margin: number;
  };
  column_min: number[];
  column_max: number[];
  config_hash: string;
}

/** Response of POST /api/brush. */
export interface SelectionResult {
  pair: number;
  region: BrushRegion & Record<string, unknown>;
  record_ids: number[];
}

/** One record's sampled curve from GET /api/curves. */
export interface CurveSamples {
  id: number;
  u: number[];
  v: number[];
}

/** Response of GET /api/curves. */
export interface CurvesResult {
  pair: number;
  curves: CurveSamples[];
}

/** Body of POST /api/render; field order matters for canonical hashing. */
export interface RenderBody {
  transfers: Record<string, TransferFunctionSpec>;
  scaling: boolean;
  corner: CornerSettings | null;
}
