/** Timing helpers: debounced triggers and latest-response-wins gating. */

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
  /** Run any pending call immediately. */
  flush(): void;
}

/** Delay calls to fn until delayMs after the most recent invocation. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;
  const run = (...args: A) => {
    pending = args;
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      const args2 = pending as A;
      pending = null;
      fn(...args2);
    }, delayMs);
  };
  run.cancel = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
    pending = null;
  };
  run.flush = () => {
    if (timer === null) return;
    clearTimeout(timer);
    timer = null;
    const args = pending as A;
    pending = null;
    fn(...args);
  };
  return run;
}

/** Issues per-request tokens so only the newest in-flight response applies.
 *
 * The UI thread is single; a slow superseded render must not overwrite
 * the image produced by a later, faster request.
 */
export class LatestOnly {
  private current = 0;

  /** Claim a token for a new request. */
  next(): number {
    this.current += 1;
    return this.current;
  }

  /** True if the token still identifies the newest request. */
  isCurrent(token: number): boolean {
    return token === this.current;
  }
}
