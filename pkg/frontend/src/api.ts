/**
 * Typed client for the torusdyn HTTP service.
 *
 * Every number the UI displays comes out of these responses; the client
 * never computes anything beyond query-string assembly.
 */

export type CoeffTriple = [number, number, number];

export interface LoopDescriptor {
  kind: "fourier";
  coeffs: CoeffTriple[];
  n?: number;
}

export type AlphaSpec = number | string | { named: string } | { alpha: number };

export interface MapDescriptor {
  family: string;
  alpha: AlphaSpec;
  coeffs: LoopDescriptor[];
  degree?: number;
}

export interface MetaResponse {
  name: string;
  version: string;
  alpha_presets: Record<string, number>;
  palette: [number, number, number][];
  tile_size: number;
  endpoints: string[];
}

export interface SliceBody {
  lambda0: LoopDescriptor;
  v1: LoopDescriptor;
  v2: LoopDescriptor;
  alpha: AlphaSpec;
  rect: [number, number, number, number];
}

export interface SliceRegistered {
  slice: string;
  rect: [number, number, number, number];
}

export interface ClassifyBody {
  task?: "classify";
  map: MapDescriptor;
  n_iter?: number;
  n_theta?: number;
  conv_tol?: number;
}

export interface ClassifyResult {
  winding: number;
  lyapunov: number;
  critical_orbit_bounded: boolean;
  critical_orbit_converges_to_zero: boolean;
  in_H0star: boolean;
  kappa_hat: [number, number] | null;
  rho: number | null;
  diagnostics: Record<string, number | null>;
  map_hash: string;
}

export interface SurgeryBody {
  task?: "surgery";
  map: MapDescriptor;
  kappa: [number, number];
}

export interface SurgeryResult {
  a_k: [number, number];
  b_k: [number, number];
  dilatation: number;
  measured_multiplier: [number, number];
  kappa_requested: [number, number];
  kappa0: [number, number];
  m: number;
  Lambda: number;
  rho: number;
  residuals: { retarget: number };
  map_hash: string;
}

export interface TileRequest {
  slice: string;
  x: number;
  y: number;
  zoom: number;
  n_iter?: number;
  n_theta?: number;
}

export interface TileStats {
  counts: { invalid: number; winding: number; nonmember: number; member: number };
  rect: [number, number, number, number];
}

export interface TileResponse {
  blob: Blob;
  stats: TileStats | null;
  etag: string | null;
}

export interface FiberParams {
  map: string; // registry handle from a prior classify/surgery POST
  theta: number;
  width?: number;
  height?: number;
  budget?: number;
}

export interface FiberStats {
  bounded_fraction: number;
  escape_radius: number;
  theta: number;
}

export interface FiberResponse {
  blob: Blob;
  stats: FiberStats | null;
}

/** Non-2xx response, already parsed. `code` is the service's error slug. */
export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** True for fetch-level failures (service down, connection refused). */
export function isOffline(err: unknown): boolean {
  return err instanceof TypeError || (err instanceof Error && err.name === "NetworkError");
}

async function parseError(res: Response): Promise<ApiError> {
  let code = `http-${res.status}`;
  let message = res.statusText;
  try {
    const body = (await res.json()) as { error?: string; message?: string };
    if (body.error) code = body.error;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(res.status, code, message);
}

function parseHeaderJson<T>(res: Response, name: string): T | null {
  const raw = res.headers.get(name);
  if (!raw) return null;
  return JSON.parse(raw) as T;
}

export class ApiClient {
  constructor(public base: string = "") {}

  private url(path: string, query?: Record<string, string | number>): string {
    const u = `${this.base}${path}`;
    if (!query) return u;
    const qs = new URLSearchParams();
    for (const [k, v] of Object.entries(query)) qs.set(k, String(v));
    return `${u}?${qs.toString()}`;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(`${this.base}${path}`, init);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  meta(signal?: AbortSignal): Promise<MetaResponse> {
    return this.json<MetaResponse>("/api/meta", { signal });
  }

  registerSlice(body: SliceBody, signal?: AbortSignal): Promise<SliceRegistered> {
    return this.post<SliceRegistered>("/api/slice", body, signal);
  }

  classify(body: ClassifyBody, signal?: AbortSignal): Promise<ClassifyResult> {
    return this.post<ClassifyResult>("/api/classify", body, signal);
  }

  surgery(body: SurgeryBody, signal?: AbortSignal): Promise<SurgeryResult> {
    return this.post<SurgeryResult>("/api/surgery", body, signal);
  }

  tileUrl(req: TileRequest): string {
    const query: Record<string, string | number> = {
      slice: req.slice,
      x: req.x,
      y: req.y,
      zoom: req.zoom,
    };
    if (req.n_iter !== undefined) query.n_iter = req.n_iter;
    if (req.n_theta !== undefined) query.n_theta = req.n_theta;
    return this.url("/api/param-tile", query);
  }

  async fetchTile(req: TileRequest, signal?: AbortSignal): Promise<TileResponse> {
    const res = await fetch(this.tileUrl(req), { signal });
    if (!res.ok) throw await parseError(res);
    return {
      blob: await res.blob(),
      stats: parseHeaderJson<TileStats>(res, "X-Tile-Stats"),
      etag: res.headers.get("ETag"),
    };
  }

  fiberUrl(params: FiberParams): string {
    const query: Record<string, string | number> = {
      map: params.map,
      theta: params.theta,
    };
    if (params.width !== undefined) query.width = params.width;
    if (params.height !== undefined) query.height = params.height;
    if (params.budget !== undefined) query.budget = params.budget;
    return this.url("/api/julia-fiber", query);
  }

  async fetchFiber(params: FiberParams, signal?: AbortSignal): Promise<FiberResponse> {
    const res = await fetch(this.fiberUrl(params), { signal });
    if (!res.ok) throw await parseError(res);
    return {
      blob: await res.blob(),
      stats: parseHeaderJson<FiberStats>(res, "X-Fiber-Stats"),
    };
  }
}
