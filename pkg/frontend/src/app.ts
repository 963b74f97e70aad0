/** DOM shell: wires browser events to the Controller and paints results. */

import { ApiClient } from './api.js';
import { Controller, type SelectionView } from './controller.js';
import type { PixelPoint } from './geometry.js';
import { defaultTransfer } from './transfer.js';

export function mountApp(root: HTMLElement, baseUrl: string): Controller {
  const ui = buildDom(root);
  const controller = new Controller(new ApiClient(baseUrl), {
    onImage(png) {
      const blob = new Blob([png], { type: 'image/png' });
      const url = URL.createObjectURL(blob);
      ui.image.onload = () => URL.revokeObjectURL(url);
      ui.image.src = url;
      ui.banner.hidden = true;
    },
    onSelections(views) {
      drawOverlay(ui.overlay, controller, views);
      ui.clearButton.disabled = views.length === 0;
    },
    onError(message) {
      ui.banner.textContent = message;
      ui.banner.hidden = false;
    },
    onFragment(fragment) {
      history.replaceState(null, '', `#${fragment}`);
    },
  });

  ui.scalingToggle.addEventListener('change', () => {
    controller.setScaling(ui.scalingToggle.checked);
  });
  ui.thresholdSlider.addEventListener('input', () => {
    controller.setCornerThreshold(Number(ui.thresholdSlider.value));
  });
  ui.radiusSlider.addEventListener('input', () => {
    controller.setCornerRadius(Number(ui.radiusSlider.value));
  });
  ui.toolSelect.addEventListener('change', () => {
    controller.setTool(ui.toolSelect.value === 'lasso' ? 'lasso' : 'rect');
  });
  ui.opacityMidSlider.addEventListener('input', () => {
    // one-knob editor: the slider moves the opacity ramp's onset
    const onset = Number(ui.opacityMidSlider.value);
    controller.editTransfer(0, defaultTransfer(onset));
  });
  ui.resetTransferButton.addEventListener('click', () => {
    controller.resetTransfer(0);
    ui.opacityMidSlider.value = '0.15';
  });
  ui.clearButton.addEventListener('click', () => controller.clearSelections());

  attachBrushGestures(ui.overlay, controller);

  void controller
    .start(location.hash.length > 1 ? location.hash.slice(1) : undefined)
    .then(() => {
      const g = controller.geometry;
      if (!g) return;
      const w = g.margin * 2 + g.pairWidth * (g.pairCount + 1);
      const h = g.margin * 2 + g.height;
      ui.overlay.width = w;
      ui.overlay.height = h;
      ui.overlay.style.width = `${w}px`;
      ui.image.style.width = `${w}px`;
    });
  return controller;
}

interface Dom {
  image: HTMLImageElement;
  overlay: HTMLCanvasElement;
  banner: HTMLElement;
  scalingToggle: HTMLInputElement;
  thresholdSlider: HTMLInputElement;
  radiusSlider: HTMLInputElement;
  opacityMidSlider: HTMLInputElement;
  resetTransferButton: HTMLButtonElement;
  toolSelect: HTMLSelectElement;
  clearButton: HTMLButtonElement;
}

function buildDom(root: HTMLElement): Dom {
  root.innerHTML = `
    <div class="aupc-toolbar">
      <label>scaling <input type="checkbox" data-id="scaling"></label>
      <label>corner threshold
        <input type="range" min="0" max="1" step="0.01" value="0" data-id="threshold">
      </label>
      <label>mask radius
        <input type="range" min="1" max="30" step="1" value="6" data-id="radius">
      </label>
      <label>opacity onset
        <input type="range" min="0" max="0.9" step="0.01" value="0.15" data-id="opacity">
      </label>
      <button data-id="reset-transfer">reset transfer</button>
      <label>brush
        <select data-id="tool">
          <option value="rect">rectangle</option>
          <option value="lasso">lasso</option>
        </select>
      </label>
      <button data-id="clear" disabled>clear selections</button>
    </div>
    <div class="aupc-banner" data-id="banner" hidden></div>
    <div class="aupc-plot" style="position: relative">
      <img data-id="image" alt="rendered plot">
      <canvas data-id="overlay" style="position: absolute; left: 0; top: 0"></canvas>
    </div>`;
  const get = <T extends Element>(id: string): T =>
    root.querySelector(`[data-id="${id}"]`) as T;
  return {
    image: get('image'),
    overlay: get('overlay'),
    banner: get('banner'),
    scalingToggle: get('scaling'),
    thresholdSlider: get('threshold'),
    radiusSlider: get('radius'),
    opacityMidSlider: get('opacity'),
    resetTransferButton: get('reset-transfer'),
    toolSelect: get('tool'),
    clearButton: get('clear'),
  };
}

function attachBrushGestures(canvas: HTMLCanvasElement, controller: Controller): void {
  let path: PixelPoint[] = [];
  let pair: number | null = null;

  const point = (e: PointerEvent): PixelPoint => {
    const rect = canvas.getBoundingClientRect();
    return { x: e.clientX - rect.left, y: e.clientY - rect.top };
  };

  canvas.addEventListener('pointerdown', (e) => {
    const p = point(e);
    pair = controller.geometry?.pairAt(p.x) ?? null;
    if (pair === null) return;
    path = [p];
    canvas.setPointerCapture(e.pointerId);
  });
  canvas.addEventListener('pointermove', (e) => {
    if (pair !== null && path.length > 0) path.push(point(e));
  });
  canvas.addEventListener('pointerup', () => {
    if (pair !== null && path.length > 1) {
      void controller.brushGesture(pair, path);
    }
    path = [];
    pair = null;
  });
}

function drawOverlay(
  canvas: HTMLCanvasElement,
  controller: Controller,
  views: SelectionView[],
): void {
  const g = controller.geometry;
  const ctx = canvas.getContext('2d');
  if (!g || !ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.lineWidth = 1;
  for (const view of views) {
    ctx.strokeStyle = view.color;
    ctx.globalAlpha = 0.85;
    for (const [pair, curves] of view.curvesByPair) {
      for (const curve of curves) {
        ctx.beginPath();
        curve.u.forEach((u, i) => {
          const x = g.xOfU(pair, u);
          const y = g.yOfV(curve.v[i]);
          if (i === 0) ctx.moveTo(x, y);
          else ctx.lineTo(x, y);
        });
        ctx.stroke();
      }
    }
  }
  ctx.globalAlpha = 1;
}
