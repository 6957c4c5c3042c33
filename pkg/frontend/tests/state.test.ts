import { describe, expect, it } from "vitest";

import {
  cellMapDescriptor,
  decodeViewState,
  defaultViewState,
  encodeViewState,
  sliceBody,
  tileRect,
  visibleTiles,
  type ViewState,
} from "../src/state.js";

function awkwardState(): ViewState {
  // values chosen to shake out lossy float formatting
  return {
    slice: "a".repeat(64),
    rect: [-1.1, 1.3, -0.7, 0.9],
    zoom: 3,
    view: { s0: -0.30000000000000004, s1: 0.1, t0: 1e-17, t1: 0.7500000000000001 },
    selected: { s: 0.1 + 0.2, t: -5e-324 },
    alphaPreset: "silver",
    sliders: [
      { mode: 0, re: 0.5, im: -0 },
      { mode: 1, re: 0.1, im: 0.30000000000000004 },
      { mode: -2, re: 1e-300, im: -2.5 },
    ],
    theta: 0.6180339887498949,
    budget: 1234,
  };
}

describe("URL fragment codec", () => {
  it("round trips every field losslessly", () => {
    const state = awkwardState();
    const restored = decodeViewState(encodeViewState(state));
    expect(restored).toEqual(state);
    // a second pass through the codec is a fixed point
    expect(encodeViewState(restored)).toBe(encodeViewState(state));
  });

  it("round trips the default state and a leading #", () => {
    const state = defaultViewState();
    expect(decodeViewState(`#${encodeViewState(state)}`)).toEqual(state);
  });

  it("reproduces an identical tile request set after restore", () => {
    const state = awkwardState();
    const restored = decodeViewState(encodeViewState(state));
    expect(visibleTiles(restored)).toEqual(visibleTiles(state));
    expect(visibleTiles(restored, { n_iter: 50, n_theta: 8 })).toEqual(
      visibleTiles(state, { n_iter: 50, n_theta: 8 }),
    );
  });

  it.each([
    "",
    "v=2&rect=0,1,0,1",
    "v=1&rect=0,1,0&view=0,1,0,1&zoom=0&theta=0&budget=1",
    "v=1&rect=0,1,0,1&view=0,1,0,1&zoom=x&theta=0&budget=1",
    "v=1&rect=0,1,0,1&view=0,1,0,1&zoom=0&theta=nope&budget=1",
    "v=1&rect=0,1,0,1&view=0,1,0,1&zoom=0&theta=0&budget=1&sl=1:2",
    "v=1&rect=0,1,0,1&view=0,1,0,1&zoom=0&theta=0&budget=1&sl=0:1:0;1:0:0;2:0:0;3:0:0;4:0:0",
    "v=1&rect=0,1,0,1&view=0,1,0,1&zoom=-1&theta=0&budget=1",
  ])("rejects malformed fragment %#", (fragment) => {
    expect(() => decodeViewState(fragment)).toThrow();
  });
});

describe("tiling arithmetic", () => {
  const rect: [number, number, number, number] = [-1, 1, -1, 1];

  it("row y = 0 is the top band", () => {
    const top = tileRect(rect, 0, 0, 1);
    expect(top.t1).toBe(1);
    expect(top.t0).toBe(0);
    const bottom = tileRect(rect, 0, 1, 1);
    expect(bottom.t1).toBe(0);
    expect(bottom.t0).toBe(-1);
  });

  it("tiles at zoom z partition the rect", () => {
    const pieces = [];
    for (let y = 0; y < 4; y++)
      for (let x = 0; x < 4; x++) pieces.push(tileRect(rect, x, y, 2));
    const area = pieces.reduce((acc, r) => acc + (r.s1 - r.s0) * (r.t1 - r.t0), 0);
    expect(area).toBeCloseTo(4, 12);
  });

  it("full viewport at zoom 0 is the single root tile", () => {
    const state = { ...defaultViewState(), slice: "s".repeat(64) };
    expect(visibleTiles(state)).toEqual([{ slice: "s".repeat(64), x: 0, y: 0, zoom: 0 }]);
  });

  it("a quadrant viewport at zoom 2 needs only a 2x2 block", () => {
    const state: ViewState = {
      ...defaultViewState(),
      slice: "s".repeat(64),
      zoom: 2,
      view: { s0: 0, s1: 1, t0: 0, t1: 1 }, // top-right quadrant
    };
    const tiles = visibleTiles(state);
    expect(tiles.map((t) => [t.x, t.y])).toEqual([
      [2, 0],
      [3, 0],
      [2, 1],
      [3, 1],
    ]);
  });

  it("a viewport straddling a tile seam pulls both neighbors", () => {
    const state: ViewState = {
      ...defaultViewState(),
      slice: "s".repeat(64),
      zoom: 1,
      view: { s0: -0.2, s1: 0.2, t0: -0.2, t1: 0.2 },
    };
    expect(visibleTiles(state)).toHaveLength(4);
  });

  it("returns nothing before a slice is registered", () => {
    expect(visibleTiles(defaultViewState())).toEqual([]);
  });
});

describe("request assembly", () => {
  it("slice body carries the slider loop and unit directions", () => {
    const state = defaultViewState();
    const body = sliceBody(state);
    expect(body.lambda0).toEqual({ kind: "fourier", coeffs: [[0, 0.5, 0]] });
    expect(body.v1.coeffs).toEqual([[0, 1, 0]]);
    expect(body.v2.coeffs).toEqual([[0, 0, 1]]);
    expect(body.alpha).toBe("golden");
  });

  it("cell map offsets the constant coefficient by (s, t)", () => {
    const state = defaultViewState();
    const desc = cellMapDescriptor(state, 0.25, -0.5);
    expect(desc.family).toBe("q_lambda");
    expect(desc.coeffs[0]!.coeffs).toEqual([[0, 0.75, -0.5]]);
  });

  it("cell map grows a constant term when the sliders lack one", () => {
    const state = { ...defaultViewState(), sliders: [{ mode: 1, re: 0.2, im: 0 }] };
    const desc = cellMapDescriptor(state, 0.1, 0.2);
    expect(desc.coeffs[0]!.coeffs).toContainEqual([0, 0.1, 0.2]);
    expect(desc.coeffs[0]!.coeffs).toContainEqual([1, 0.2, 0]);
  });

  it("sliders serialize in mode order regardless of entry order", () => {
    const state = {
      ...defaultViewState(),
      sliders: [
        { mode: 2, re: 0.1, im: 0 },
        { mode: -1, re: 0.3, im: 0.4 },
      ],
    };
    expect(sliceBody(state).lambda0.coeffs).toEqual([
      [-1, 0.3, 0.4],
      [2, 0.1, 0],
    ]);
  });
});
