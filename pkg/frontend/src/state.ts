/**
 * Shareable explorer state and the tiling arithmetic derived from it.
 *
 * The URL fragment codec is lossless: encode/decode round-trips every
 * number bit-for-bit (String(x) emits the shortest digits that parse back
 * to the same float), so a restored state requests the identical tile set.
 */

import type { LoopDescriptor, SliceBody, TileRequest } from "./api.js";

/** One adjustable Fourier mode of the base loop lambda0. */
export interface ModeSlider {
  mode: number;
  re: number;
  im: number;
}

export interface Viewport {
  s0: number;
  s1: number;
  t0: number;
  t1: number;
}

export interface ViewState {
  /** Registry handle of the slice being browsed; null before first registration. */
  slice: string | null;
  /** Full (s,t) rectangle of the registered slice. */
  rect: [number, number, number, number];
  zoom: number;
  view: Viewport;
  /** Selected parameter in (s,t), or null when nothing is inspected. */
  selected: { s: number; t: number } | null;
  alphaPreset: string;
  /** Up to 4 complex coefficient sliders defining lambda0. */
  sliders: ModeSlider[];
  /** Inspector state: fiber angle and iteration budget. */
  theta: number;
  budget: number;
}

export const MAX_SLIDERS = 4;

export function defaultViewState(): ViewState {
  return {
    slice: null,
    rect: [-1, 1, -1, 1],
    zoom: 0,
    view: { s0: -1, s1: 1, t0: -1, t1: 1 },
    selected: null,
    alphaPreset: "golden",
    sliders: [{ mode: 0, re: 0.5, im: 0 }],
    theta: 0,
    budget: 200,
  };
}

// ---------------------------------------------------------------------------
// URL fragment codec

function num(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite value in view state: ${x}`);
  // String(-0) collapses to "0"; keep the sign so decoding is bit-exact
  return Object.is(x, -0) ? "-0" : String(x);
}

function parseNum(raw: string | undefined, what: string): number {
  if (raw === undefined || raw === "") throw new Error(`missing ${what}`);
  const v = Number(raw);
  if (!Number.isFinite(v)) throw new Error(`bad ${what}: ${raw!}`);
  return v;
}

function parseInt_(raw: string | undefined, what: string): number {
  const v = parseNum(raw, what);
  if (!Number.isInteger(v)) throw new Error(`${what} must be an integer: ${raw!}`);
  return v;
}

/** Serialize into a `#`-less fragment string. */
export function encodeViewState(state: ViewState): string {
  const q = new URLSearchParams();
  q.set("v", "1");
  if (state.slice) q.set("slice", state.slice);
  q.set("rect", state.rect.map(num).join(","));
  q.set("zoom", num(state.zoom));
  const { s0, s1, t0, t1 } = state.view;
  q.set("view", [s0, s1, t0, t1].map(num).join(","));
  if (state.selected) q.set("sel", [state.selected.s, state.selected.t].map(num).join(","));
  q.set("alpha", state.alphaPreset);
  if (state.sliders.length) {
    q.set("sl", state.sliders.map((c) => [c.mode, c.re, c.im].map(num).join(":")).join(";"));
  }
  q.set("theta", num(state.theta));
  q.set("budget", num(state.budget));
  return q.toString();
}

/** Inverse of encodeViewState. Throws on anything malformed. */
export function decodeViewState(fragment: string): ViewState {
  const q = new URLSearchParams(fragment.replace(/^#/, ""));
  if (q.get("v") !== "1") throw new Error("unknown state version");

  const rectRaw = (q.get("rect") ?? "").split(",");
  if (rectRaw.length !== 4) throw new Error("rect needs 4 numbers");
  const rect = rectRaw.map((r, i) => parseNum(r, `rect[${i}]`)) as [
    number,
    number,
    number,
    number,
  ];

  const viewRaw = (q.get("view") ?? "").split(",");
  if (viewRaw.length !== 4) throw new Error("view needs 4 numbers");
  const view: Viewport = {
    s0: parseNum(viewRaw[0], "view.s0"),
    s1: parseNum(viewRaw[1], "view.s1"),
    t0: parseNum(viewRaw[2], "view.t0"),
    t1: parseNum(viewRaw[3], "view.t1"),
  };

  let selected: ViewState["selected"] = null;
  const sel = q.get("sel");
  if (sel !== null) {
    const parts = sel.split(",");
    if (parts.length !== 2) throw new Error("sel needs 2 numbers");
    selected = { s: parseNum(parts[0], "sel.s"), t: parseNum(parts[1], "sel.t") };
  }

  const sliders: ModeSlider[] = [];
  const sl = q.get("sl");
  if (sl !== null && sl !== "") {
    for (const part of sl.split(";")) {
      const bits = part.split(":");
      if (bits.length !== 3) throw new Error(`slider needs mode:re:im, got ${part}`);
      sliders.push({
        mode: parseInt_(bits[0], "slider mode"),
        re: parseNum(bits[1], "slider re"),
        im: parseNum(bits[2], "slider im"),
      });
    }
  }
  if (sliders.length > MAX_SLIDERS) throw new Error(`at most ${MAX_SLIDERS} sliders`);

  const zoom = parseInt_(q.get("zoom") ?? undefined, "zoom");
  if (zoom < 0 || zoom > 24) throw new Error(`zoom out of range: ${zoom}`);

  return {
    slice: q.get("slice"),
    rect,
    zoom,
    view,
    selected,
    alphaPreset: q.get("alpha") ?? "golden",
    sliders,
    theta: parseNum(q.get("theta") ?? undefined, "theta"),
    budget: parseInt_(q.get("budget") ?? undefined, "budget"),
  };
}

// ---------------------------------------------------------------------------
// Tiling arithmetic (mirrors the service's tile-window convention)

export interface TileRect {
  s0: number;
  s1: number;
  t0: number;
  t1: number;
}

/** Rect covered by tile (x, y) at `zoom`; row y = 0 is the top band. */
export function tileRect(rect: [number, number, number, number], x: number, y: number, zoom: number): TileRect {
  const [s0, s1, t0, t1] = rect;
  const n = 1 << zoom;
  const ds = (s1 - s0) / n;
  const dt = (t1 - t0) / n;
  return {
    s0: s0 + x * ds,
    s1: s0 + (x + 1) * ds,
    t0: t1 - (y + 1) * dt,
    t1: t1 - y * dt,
  };
}

/**
 * Tiles at the state's zoom whose rect intersects the viewport, in a
 * deterministic (row-major) order. Empty when no slice is registered.
 */
export function visibleTiles(
  state: ViewState,
  detail?: { n_iter?: number; n_theta?: number },
): TileRequest[] {
  if (!state.slice) return [];
  const [s0, s1, t0, t1] = state.rect;
  const n = 1 << state.zoom;
  const ds = (s1 - s0) / n;
  const dt = (t1 - t0) / n;
  const v = state.view;

  // column range overlapping [v.s0, v.s1]
  const x0 = Math.max(0, Math.floor((v.s0 - s0) / ds));
  const x1 = Math.min(n - 1, Math.ceil((v.s1 - s0) / ds) - 1);
  // row range overlapping [v.t0, v.t1]; y counts down from the top band
  const y0 = Math.max(0, Math.floor((t1 - v.t1) / dt));
  const y1 = Math.min(n - 1, Math.ceil((t1 - v.t0) / dt) - 1);

  const out: TileRequest[] = [];
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      const req: TileRequest = { slice: state.slice, x, y, zoom: state.zoom };
      if (detail?.n_iter !== undefined) req.n_iter = detail.n_iter;
      if (detail?.n_theta !== undefined) req.n_theta = detail.n_theta;
      out.push(req);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Request-body assembly (data plumbing; the service does all the math)

/** lambda0 built from the coefficient sliders. */
export function lambda0Descriptor(state: ViewState): LoopDescriptor {
  const coeffs = state.sliders
    .slice()
    .sort((a, b) => a.mode - b.mode)
    .map((c) => [c.mode, c.re, c.im] as [number, number, number]);
  return { kind: "fourier", coeffs };
}

/** Slice body: lambda(s, t) = lambda0 + s·1 + t·i over the state's rect. */
export function sliceBody(state: ViewState): SliceBody {
  return {
    lambda0: lambda0Descriptor(state),
    v1: { kind: "fourier", coeffs: [[0, 1, 0]] },
    v2: { kind: "fourier", coeffs: [[0, 0, 1]] },
    alpha: state.alphaPreset,
    rect: state.rect,
  };
}

/** Map descriptor for the parameter at (s, t): the slice's lambda plus the offset. */
export function cellMapDescriptor(state: ViewState, s: number, t: number) {
  const coeffs = lambda0Descriptor(state).coeffs.map(
    (c) => [...c] as [number, number, number],
  );
  const zero = coeffs.findIndex((c) => c[0] === 0);
  if (zero >= 0) {
    coeffs[zero]![1] += s;
    coeffs[zero]![2] += t;
  } else {
    coeffs.unshift([0, s, t]);
  }
  return {
    family: "q_lambda",
    alpha: state.alphaPreset,
    coeffs: [{ kind: "fourier" as const, coeffs }],
  };
}
