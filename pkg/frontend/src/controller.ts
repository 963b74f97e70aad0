/** Headless UI controller: owns the view state and drives the service.
 *
 * All interaction logic lives here, DOM-free, so it can be exercised in
 * tests; app.ts only translates DOM events into these calls and paints
 * the results.
 */

import { ApiClient } from './api.js';
import { PlotGeometry, type PixelPoint } from './geometry.js';
import {
  defaultViewState,
  deserializeState,
  renderBody,
  serializeState,
  type BrushTool,
  type ViewState,
} from './state.js';
import { debounce, LatestOnly, type Debounced } from './scheduler.js';
import type {
  CurveSamples,
  DatasetMeta,
  TransferFunctionSpec,
} from './types.js';

/** Colors cycled through as selections are created. */
export const SELECTION_PALETTE = [
  '#e6720e',
  '#1b9e77',
  '#7570b3',
  '#e7298a',
  '#66a61e',
  '#a6761d',
];

const DEBOUNCE_MS = 500;

/** A selection plus its server-derived data, ready to draw. */
export interface SelectionView {
  color: string;
  recordIds: number[];
  /** Highlight polylines per pair, fetched from /api/curves. */
  curvesByPair: Map<number, CurveSamples[]>;
}

export interface ControllerEvents {
  /** A completed, still-current render arrived. */
  onImage(png: ArrayBuffer): void;
  /** Selections changed (brush added, cleared, or restored). */
  onSelections(views: SelectionView[]): void;
  /** Service failure; the last good image stays on screen. */
  onError(message: string): void;
  /** The shareable fragment for the current state changed. */
  onFragment(fragment: string): void;
}

export class Controller {
  state: ViewState = defaultViewState();
  meta: DatasetMeta | null = null;
  geometry: PlotGeometry | null = null;
  private views: SelectionView[] = [];
  private readonly renderGate = new LatestOnly();
  private readonly debouncedRender: Debounced<[]>;

  constructor(
    private readonly api: ApiClient,
    private readonly events: ControllerEvents,
  ) {
    this.debouncedRender = debounce(() => void this.refresh(), DEBOUNCE_MS);
  }

  /** Load metadata and render the initial view. */
  async start(fragment?: string): Promise<void> {
    try {
      this.meta = await this.api.meta();
    } catch (e) {
      this.events.onError(String(e));
      return;
    }
    this.geometry = new PlotGeometry(this.meta);
    const restored = fragment ? deserializeState(fragment) : null;
    if (restored) {
      this.state = restored;
      await this.refresh();
      await this.rebrushAll();
    } else {
      await this.refresh();
    }
  }

  /** Immediate re-render; stale responses are discarded. */
  async refresh(): Promise<void> {
    const token = this.renderGate.next();
    this.events.onFragment(serializeState(this.state));
    try {
      const png = await this.api.render(renderBody(this.state));
      if (this.renderGate.isCurrent(token)) this.events.onImage(png);
    } catch (e) {
      if (this.renderGate.isCurrent(token)) this.events.onError(String(e));
    }
  }

  /** Continuous-control edits coalesce into one render per 500 ms. */
  private scheduleRender(): void {
    this.events.onFragment(serializeState(this.state));
    this.debouncedRender();
  }

  setScaling(on: boolean): void {
    this.state.scaling = on;
    void this.refresh();
  }

  setCornerThreshold(t: number): void {
    this.state.cornerThreshold = Math.min(1, Math.max(0, t));
    this.scheduleRender();
  }

  setCornerRadius(rho: number): void {
    this.state.cornerRadius = Math.max(1, Math.round(rho));
    this.scheduleRender();
  }

  setTool(tool: BrushTool): void {
    this.state.tool = tool;
  }

  /** Replace one pair's transfer function (stops are sorted on send). */
  editTransfer(pair: number, tf: TransferFunctionSpec): void {
    this.state.transfers[String(pair)] = tf;
    this.scheduleRender();
  }

  resetTransfer(pair: number): void {
    delete this.state.transfers[String(pair)];
    this.scheduleRender();
  }

  /** Finish a brush gesture: convert, query, and store the selection. */
  async brushGesture(pair: number, path: PixelPoint[]): Promise<SelectionView | null> {
    if (!this.geometry) return null;
    const region =
      this.state.tool === 'rect'
        ? this.geometry.rectFromDrag(pair, path[0], path[path.length - 1])
        : this.geometry.lassoFromPath(pair, path);
    if (!region) return null;
    const color = SELECTION_PALETTE[this.state.selections.length % SELECTION_PALETTE.length];
    try {
      const view = await this.fetchSelection(region, color);
      this.state.selections.push({ region, color });
      this.views.push(view);
      this.events.onSelections([...this.views]);
      this.events.onFragment(serializeState(this.state));
      return view;
    } catch (e) {
      this.events.onError(String(e));
      return null;
    }
  }

  clearSelections(): void {
    this.state.selections = [];
    this.views = [];
    this.events.onSelections([]);
    this.events.onFragment(serializeState(this.state));
  }

  selectionViews(): SelectionView[] {
    return [...this.views];
  }

  /** Re-run every stored region, e.g. after restoring a shared URL. */
  private async rebrushAll(): Promise<void> {
    this.views = [];
    for (const sel of this.state.selections) {
      try {
        this.views.push(await this.fetchSelection(sel.region, sel.color));
      } catch (e) {
        this.events.onError(String(e));
      }
    }
    this.events.onSelections([...this.views]);
  }

  private async fetchSelection(
    region: ViewState['selections'][number]['region'],
    color: string,
  ): Promise<SelectionView> {
    const result = await this.api.brush(region);
    const curvesByPair = new Map<number, CurveSamples[]>();
    const pairCount = this.meta?.pair_count ?? 1;
    for (let pair = 0; pair < pairCount; pair += 1) {
      const curves = await this.api.curves(pair, result.record_ids);
      curvesByPair.set(pair, curves.curves);
    }
    return { color, recordIds: result.record_ids, curvesByPair };
  }
}
