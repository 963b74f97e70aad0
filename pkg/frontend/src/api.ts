/** Thin typed client for the aupc HTTP service. */

import type {
  BrushRegion,
  CurvesResult,
  DatasetMeta,
  RenderBody,
  SelectionResult,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** A non-2xx service response, with the server's error message if any. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(`service error ${status}: ${message}`);
  }
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  async meta(): Promise<DatasetMeta> {
    const res = await this.fetchFn(`${this.baseUrl}/api/dataset/meta`);
    return (await this.json(res)) as DatasetMeta;
  }

  /** Render PNG bytes for the given body; identical bodies give identical bytes. */
  async render(body: RenderBody, layer = 'final'): Promise<ArrayBuffer> {
    const res = await this.fetchFn(
      `${this.baseUrl}/api/render?layer=${encodeURIComponent(layer)}`,
      {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(body),
      },
    );
    if (!res.ok) throw await this.toError(res);
    return res.arrayBuffer();
  }

  async brush(region: BrushRegion): Promise<SelectionResult> {
    const res = await this.fetchFn(`${this.baseUrl}/api/brush`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ region }),
    });
    return (await this.json(res)) as SelectionResult;
  }

  async curves(pair: number, ids: number[]): Promise<CurvesResult> {
    const query = `pair=${pair}&ids=${ids.join(',')}`;
    const res = await this.fetchFn(`${this.baseUrl}/api/curves?${query}`);
    return (await this.json(res)) as CurvesResult;
  }

  private async json(res: Response): Promise<unknown> {
    if (!res.ok) throw await this.toError(res);
    return res.json();
  }

  private async toError(res: Response): Promise<ApiError> {
    let message = res.statusText;
    try {
      const body = (await res.json()) as { error?: string };
      if (body.error) message = body.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    return new ApiError(res.status, message);
  }
}
