// Typed client for the atlas service API. All calls go through an injectable
// fetch so tests can run against a fake transport.

export interface LayoutNode {
  chart_id: number;
  x: number;
  y: number;
  render_radius: number;
}

export interface LayoutBlock {
  nodes: LayoutNode[];
  unresolved_overlaps: number;
  iterations: number;
  seed: number;
}

export interface AtlasChartSummary {
  chart_id: number;
  center_id: number;
  d: number;
  members: number[];
  mean: number[];
}

export interface AtlasDocument {
  schema_version: string;
  d_max: number;
  charts: AtlasChartSummary[];
  edges: [number, number, number][];
  layout?: LayoutBlock;
}

export interface GridSampling {
  steps: number;
  extent_sigmas: number;
  axis_scales: number[];
}

export interface ChartDetail {
  chart_id: number;
  center_id: number;
  d: number;
  members: number[];
  member_coords: number[][];
  mean: number[];
  basis: number[][];
  sing_values: number[];
  grid_sampling: GridSampling;
}

export interface SynthesizeResponse {
  vector: number[];
  vector_id: number;
}

export interface HistoryEntry {
  vector_id: number;
  timestamp: number;
  chart_id: number;
  coeffs: number[];
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private pendingDecodes = new Map<string, Promise<Blob>>();

  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) {
      throw new ApiError(response.status, `GET ${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; schema_version: string }> {
    return this.getJson("/api/health");
  }

  atlas(): Promise<AtlasDocument> {
    return this.getJson("/api/atlas");
  }

  layout(): Promise<LayoutBlock> {
    return this.getJson("/api/layout");
  }

  chart(chartId: number): Promise<ChartDetail> {
    return this.getJson(`/api/chart/${chartId}`);
  }

  history(): Promise<{ entries: HistoryEntry[] }> {
    return this.getJson("/api/history");
  }

  async synthesize(chartId: number, coeffs: number[], expectedD: number): Promise<SynthesizeResponse> {
    // client-side mirror of the server's 422 contract
    if (coeffs.length !== expectedD) {
      throw new ApiError(422, `chart ${chartId} needs ${expectedD} coefficients, got ${coeffs.length}`);
    }
    const response = await this.fetchImpl(this.baseUrl + "/api/synthesize", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ chart_id: chartId, coeffs }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, `synthesize failed: ${response.status}`);
    }
    return (await response.json()) as SynthesizeResponse;
  }

  async decodeVector(vector: number[]): Promise<Blob> {
    return this.decodeBody({ vector });
  }

  async decodeVectorId(vectorId: number): Promise<Blob> {
    return this.decodeBody({ vector_id: vectorId });
  }

  private async decodeBody(body: { vector?: number[]; vector_id?: number }): Promise<Blob> {
    // de-duplicate identical in-flight decode requests (e.g. grid cells that
    // share a vector while the user sweeps the pointer across them)
    const key = JSON.stringify(body);
    const pending = this.pendingDecodes.get(key);
    if (pending) return pending;
    const promise = (async () => {
      try {
        const response = await this.fetchImpl(this.baseUrl + "/api/decode", {
          method: "POST",
          headers: { "content-type": "application/json" },
          body: JSON.stringify(body),
        });
        if (!response.ok) {
          throw new ApiError(response.status, `decode failed: ${response.status}`);
        }
        return await response.blob();
      } finally {
        this.pendingDecodes.delete(key);
      }
    })();
    this.pendingDecodes.set(key, promise);
    return promise;
  }

  pendingDecodeCount(): number {
    return this.pendingDecodes.size;
  }
}
