/** View state: the single source of interaction truth.
 *
 * The state serializes 1:1 into the /api/render request body (so the
 * server needs no session) and into a URL fragment (so a view can be
 * shared and restored exactly). Selections store their regions and
 * colors; the selected record ids are derived server data and are
 * re-fetched on restore.
 */

import type {
  BrushRegion,
  CornerSettings,
  RenderBody,
  TransferFunctionSpec,
} from './types.js';

export type BrushTool = 'rect' | 'lasso';

/** One active brush selection; keeps its color until cleared. */
export interface SelectionState {
  region: BrushRegion;
  /** CSS color, assigned when the selection is created. */
  color: string;
}

export interface ViewState {
  /** Per-pair transfer function overrides, keyed by pair index. */
  transfers: Record<string, TransferFunctionSpec>;
  /** Whether the vertical scaling spline is applied. */
  scaling: boolean;
  /** Corner-metric threshold in [0, 1]; 0 disables masking. */
  cornerThreshold: number;
  /** Mask falloff radius in pixels. */
  cornerRadius: number;
  /** Currently armed brush tool. */
  tool: BrushTool;
  /** Active selections in creation order. */
  selections: SelectionState[];
  /** Pair shown in the linked scatterplot. */
  scatterPair: number;
}

const DEFAULT_CORNER_RADIUS = 6;

export function defaultViewState(): ViewState {
  return {
    transfers: {},
    scaling: false,
    cornerThreshold: 0,
    cornerRadius: DEFAULT_CORNER_RADIUS,
    tool: 'rect',
    selections: [],
    scatterPair: 0,
  };
}

/** The exact /api/render body for a state (threshold 0 ⇒ no mask). */
export function renderBody(state: ViewState): RenderBody {
  const corner: CornerSettings | null =
    state.cornerThreshold > 0
      ? {
          window: 5,
          threshold: state.cornerThreshold,
          radius: state.cornerRadius,
          percentile_window: null,
          percentile: 50,
        }
      : null;
  return { transfers: canonicalTransfers(state.transfers), scaling: state.scaling, corner };
}

/** Transfers with sorted pair keys and position-sorted stops. */
function canonicalTransfers(
  transfers: Record<string, TransferFunctionSpec>,
): Record<string, TransferFunctionSpec> {
  const out: Record<string, TransferFunctionSpec> = {};
  for (const key of Object.keys(transfers).sort((a, b) => Number(a) - Number(b))) {
    const tf = transfers[key];
    out[key] = {
      color_stops: [...tf.color_stops].sort((a, b) => a.position - b.position),
      opacity_stops: [...tf.opacity_stops].sort((a, b) => a.position - b.position),
      mode: tf.mode,
    };
  }
  return out;
}

/** Canonical plain-object form with a fixed key order, for hashing/URLs. */
function canonicalState(state: ViewState): ViewState {
  return {
    transfers: canonicalTransfers(state.transfers),
    scaling: state.scaling,
    cornerThreshold: state.cornerThreshold,
    cornerRadius: state.cornerRadius,
    tool: state.tool,
    selections: state.selections.map((s) => ({
      region: canonicalRegion(s.region),
      color: s.color,
    })),
    scatterPair: state.scatterPair,
  };
}

function canonicalRegion(region: BrushRegion): BrushRegion {
  if (region.kind === 'rect') {
    const { pair, u0, u1, v0, v1 } = region;
    return { kind: 'rect', pair, u0, u1, v0, v1 };
  }
  return {
    kind: 'lasso',
    pair: region.pair,
    vertices: region.vertices.map(([u, v]) => [u, v]),
  };
}

/** Encode the state as a URL fragment (without the leading '#'). */
export function serializeState(state: ViewState): string {
  return encodeURIComponent(JSON.stringify(canonicalState(state)));
}

/** Decode a fragment produced by serializeState; null if unreadable. */
export function deserializeState(fragment: string): ViewState | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(decodeURIComponent(fragment));
  } catch {
    return null;
  }
  if (typeof parsed !== 'object' || parsed === null) return null;
  const raw = parsed as Record<string, unknown>;
  const base = defaultViewState();
  const state: ViewState = {
    transfers: (raw.transfers as ViewState['transfers']) ?? base.transfers,
    scaling: typeof raw.scaling === 'boolean' ? raw.scaling : base.scaling,
    cornerThreshold: clamp01(num(raw.cornerThreshold, base.cornerThreshold)),
    cornerRadius: Math.max(1, Math.round(num(raw.cornerRadius, base.cornerRadius))),
    tool: raw.tool === 'lasso' ? 'lasso' : 'rect',
    selections: Array.isArray(raw.selections)
      ? (raw.selections as SelectionState[]).filter(isSelection)
      : base.selections,
    scatterPair: Math.max(0, Math.round(num(raw.scatterPair, base.scatterPair))),
  };
  return canonicalState(state);
}

function num(x: unknown, fallback: number): number {
  return typeof x === 'number' && Number.isFinite(x) ? x : fallback;
}

function clamp01(x: number): number {
  return Math.min(1, Math.max(0, x));
}

function isSelection(s: unknown): s is SelectionState {
  if (typeof s !== 'object' || s === null) return false;
  const sel = s as Record<string, unknown>;
  if (typeof sel.color !== 'string') return false;
  const region = sel.region as Record<string, unknown> | undefined;
  return region?.kind === 'rect' || region?.kind === 'lasso';
}
