/** Transfer-function construction and stop editing helpers. */

import type { OpacityStop, TransferFunctionSpec } from './types.js';

/** The service's default blue ramp with an adjustable opacity onset.
 *
 * Opacity is zero up to `onset`, then ramps steeply to fully opaque —
 * low-density noise stays invisible while dense structures saturate.
 */
export function defaultTransfer(onset = 0.15): TransferFunctionSpec {
  const o = Math.min(0.9, Math.max(0, onset));
  return {
    color_stops: [
      { position: 0, rgb: [1, 1, 1] },
      { position: 0.5, rgb: [0.33, 0.54, 0.83] },
      { position: 1, rgb: [0.03, 0.19, 0.42] },
    ],
    opacity_stops: [
      { position: 0, alpha: 0 },
      { position: o, alpha: 0 },
      { position: Math.min(1, o + 0.25), alpha: 0.9 },
      { position: 1, alpha: 1 },
    ],
    mode: 'log',
  };
}

/** Move one opacity stop, clamped between its neighbors' positions. */
export function moveOpacityStop(
  stops: OpacityStop[],
  index: number,
  position: number,
  alpha: number,
): OpacityStop[] {
  if (index < 0 || index >= stops.length) return stops;
  const lo = index > 0 ? stops[index - 1].position : 0;
  const hi = index < stops.length - 1 ? stops[index + 1].position : 1;
  const next = stops.map((s) => ({ ...s }));
  next[index].position = Math.min(hi, Math.max(lo, position));
  next[index].alpha = Math.min(1, Math.max(0, alpha));
  return next;
}

/** Insert an opacity stop, keeping positions sorted. */
export function addOpacityStop(
  stops: OpacityStop[],
  position: number,
  alpha: number,
): OpacityStop[] {
  const next = [
    ...stops,
    { position: Math.min(1, Math.max(0, position)), alpha: Math.min(1, Math.max(0, alpha)) },
  ];
  next.sort((a, b) => a.position - b.position);
  return next;
}
