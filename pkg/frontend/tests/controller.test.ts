import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { Controller, SELECTION_PALETTE, type ControllerEvents } from '../src/controller.js';
import { serializeState } from '../src/state.js';
import { fakeBrush, fakeFetch, fakeRenderBytes, type FakeServiceLog } from './fake_service.js';

interface Harness {
  controller: Controller;
  log: FakeServiceLog;
  images: Uint8Array[];
  errors: string[];
  fragments: string[];
  selectionCounts: number[];
}

function harness(): Harness {
  const log: FakeServiceLog = { renderBodies: [], brushRegions: [] };
  const h: Omit<Harness, 'controller'> = {
    log,
    images: [],
    errors: [],
    fragments: [],
    selectionCounts: [],
  };
  const events: ControllerEvents = {
    onImage: (png) => h.images.push(new Uint8Array(png)),
    onSelections: (views) => h.selectionCounts.push(views.length),
    onError: (m) => h.errors.push(m),
    onFragment: (f) => h.fragments.push(f),
  };
  const controller = new Controller(new ApiClient('http://service', fakeFetch(log)), events);
  return { controller, ...h };
}

describe('Controller', () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it('renders the default view on start', async () => {
    const h = harness();
    await h.controller.start();
    expect(h.images).toHaveLength(1);
    expect(h.errors).toHaveLength(0);
    expect(JSON.parse(h.log.renderBodies[0])).toMatchObject({ scaling: false, corner: null });
  });

  it('debounces threshold slides into a single render', async () => {
    const h = harness();
    await h.controller.start();
    h.controller.setCornerThreshold(0.2);
    h.controller.setCornerThreshold(0.4);
    h.controller.setCornerThreshold(0.6);
    expect(h.log.renderBodies).toHaveLength(1); // only the initial render so far
    await vi.advanceTimersByTimeAsync(500);
    expect(h.log.renderBodies).toHaveLength(2);
    expect(JSON.parse(h.log.renderBodies[1]).corner.threshold).toBe(0.6);
  });

  it('scaling toggles re-render immediately', async () => {
    const h = harness();
    await h.controller.start();
    h.controller.setScaling(true);
    await vi.runAllTimersAsync();
    expect(JSON.parse(h.log.renderBodies[1])).toMatchObject({ scaling: true });
  });

  it('highlights exactly the ids of a direct brush call on the same region', async () => {
    const h = harness();
    await h.controller.start();
    const g = h.controller.geometry;
    expect(g).not.toBeNull();
    // drag a rectangle around u in [0.2, 0.6], v in [0.3, 0.7]
    const view = await h.controller.brushGesture(0, [
      { x: g!.xOfU(0, 0.2), y: g!.yOfV(0.7) },
      { x: g!.xOfU(0, 0.6), y: g!.yOfV(0.3) },
    ]);
    expect(view).not.toBeNull();
    const region = h.log.brushRegions[0];
    expect(view!.recordIds).toEqual(fakeBrush(region));
    expect(view!.recordIds.length).toBeGreaterThan(0);
    // highlight polylines were fetched for every selected record
    expect(view!.curvesByPair.get(0)?.map((c) => c.id)).toEqual(view!.recordIds);
  });

  it('keeps each selection color stable and clears on demand', async () => {
    const h = harness();
    await h.controller.start();
    const g = h.controller.geometry!;
    const drag = async (u0: number, u1: number) =>
      h.controller.brushGesture(0, [
        { x: g.xOfU(0, u0), y: g.yOfV(0.9) },
        { x: g.xOfU(0, u1), y: g.yOfV(0.1) },
      ]);
    const first = await drag(0.1, 0.3);
    const second = await drag(0.5, 0.8);
    expect(first!.color).toBe(SELECTION_PALETTE[0]);
    expect(second!.color).toBe(SELECTION_PALETTE[1]);
    await h.controller.refresh(); // re-render must not touch selections
    expect(h.controller.selectionViews().map((v) => v.color)).toEqual([
      SELECTION_PALETTE[0],
      SELECTION_PALETTE[1],
    ]);
    h.controller.clearSelections();
    expect(h.controller.selectionViews()).toHaveLength(0);
    expect(h.controller.state.selections).toHaveLength(0);
  });

  it('restoring a shared fragment reproduces the same image bytes', async () => {
    const h1 = harness();
    await h1.controller.start();
    h1.controller.setScaling(true);
    h1.controller.setCornerThreshold(0.35);
    await vi.advanceTimersByTimeAsync(500);
    const fragment = serializeState(h1.controller.state);
    const lastImage = h1.images[h1.images.length - 1];

    const h2 = harness();
    await h2.controller.start(fragment);
    expect(h2.images[h2.images.length - 1]).toEqual(lastImage);
    expect(h2.log.renderBodies[0]).toBe(h1.log.renderBodies[h1.log.renderBodies.length - 1]);
  });

  it('restoring a fragment re-runs stored brushes with their colors', async () => {
    const h1 = harness();
    await h1.controller.start();
    const g = h1.controller.geometry!;
    await h1.controller.brushGesture(0, [
      { x: g.xOfU(0, 0.2), y: g.yOfV(0.7) },
      { x: g.xOfU(0, 0.6), y: g.yOfV(0.3) },
    ]);
    const fragment = serializeState(h1.controller.state);
    const ids = h1.controller.selectionViews()[0].recordIds;

    const h2 = harness();
    await h2.controller.start(fragment);
    const views = h2.controller.selectionViews();
    expect(views).toHaveLength(1);
    expect(views[0].recordIds).toEqual(ids);
    expect(views[0].color).toBe(SELECTION_PALETTE[0]);
  });

  it('keeps the last good image and raises a banner on service errors', async () => {
    const h = harness();
    await h.controller.start();
    expect(h.images).toHaveLength(1);
    // a degenerate brush region makes the fake service answer 400
    h.controller.state.tool = 'lasso';
    const g = h.controller.geometry!;
    const p = { x: g.xOfU(0, 0.5), y: g.yOfV(0.5) };
    const view = await h.controller.brushGesture(0, [p, p]);
    expect(view).toBeNull(); // degenerate gesture rejected client-side
    expect(h.images).toHaveLength(1); // image untouched
  });

  it('applies only the newest of two interleaved renders', async () => {
    const log: FakeServiceLog = { renderBodies: [], brushRegions: [] };
    const base = fakeFetch(log);
    let delayFirstRender = false;
    let release: (() => void) | null = null;
    const gated: typeof base = async (url, init) => {
      if (delayFirstRender && url.includes('/api/render')) {
        delayFirstRender = false;
        await new Promise<void>((r) => {
          release = r;
        });
      }
      return base(url, init);
    };
    const images: string[] = [];
    const controller = new Controller(new ApiClient('http://service', gated), {
      onImage: (png) => images.push(Array.from(new Uint8Array(png)).join(',')),
      onSelections: () => {},
      onError: () => {},
      onFragment: () => {},
    });
    await controller.start();
    delayFirstRender = true;
    const slow = controller.refresh(); // stalls inside the fake service
    controller.setScaling(true); // newer render completes first
    await vi.runAllTimersAsync();
    // the newer request has reached the service; the older one is stalled
    const newestBody = log.renderBodies[log.renderBodies.length - 1];
    expect(JSON.parse(newestBody).scaling).toBe(true);
    const countAfterNewest = images.length;
    release!();
    await slow;
    // the stalled (older) response must be discarded, not applied late
    expect(images).toHaveLength(countAfterNewest);
    expect(images[images.length - 1]).toBe(
      Array.from(fakeRenderBytes(newestBody)).join(','),
    );
  });
});
