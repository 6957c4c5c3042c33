import { describe, expect, it, vi } from "vitest";

import { ApiError, type ClassifyResult, type SurgeryResult } from "../src/api.js";
import { debounce } from "../src/debounce.js";
import {
  formatComplex,
  inspectorFromClassify,
  inspectorFromError,
  NO_KAPPA_BADGE,
  retargetModel,
} from "../src/inspector.js";

function classifyResult(over: Partial<ClassifyResult> = {}): ClassifyResult {
  return {
    winding: 0,
    lyapunov: -0.6931471805599453,
    critical_orbit_bounded: true,
    critical_orbit_converges_to_zero: true,
    in_H0star: true,
    kappa_hat: [0.5, 0],
    rho: 0,
    diagnostics: {},
    map_hash: "a".repeat(64),
    ...over,
  };
}

describe("inspector view-model", () => {
  it("shows the service's kappa-hat verbatim for winding 0", () => {
    const model = inspectorFromClassify(classifyResult());
    expect(model.kind).toBe("ready");
    expect(model.kappaHat).toBe("0.5");
    expect(model.badge).toBeNull();
    expect(model.member).toBe(true);
    expect(model.winding).toBe(0);
  });

  it("replaces kappa-hat with the badge when winding is nonzero", () => {
    const model = inspectorFromClassify(
      classifyResult({ winding: 1, kappa_hat: null, rho: null, in_H0star: false }),
    );
    expect(model.kappaHat).toBeNull();
    expect(model.badge).toBe(NO_KAPPA_BADGE);
    expect(model.badge).toBe("no κ̂ (winding ≠ 0)");
  });

  it("maps a 422 to a domain-error panel with the service code", () => {
    const model = inspectorFromError(new ApiError(422, "vanishing-lambda", "loop has a zero"));
    expect(model.kind).toBe("domain-error");
    expect(model.error).toEqual({ code: "vanishing-lambda", message: "loop has a zero" });
  });

  it("maps a network failure to the offline retry state", () => {
    const model = inspectorFromError(new TypeError("fetch failed"));
    expect(model.kind).toBe("offline");
    expect(model.error?.code).toBe("offline");
  });

  it("rethrows programming errors instead of hiding them", () => {
    expect(() => inspectorFromError(new RangeError("oops"))).toThrow(RangeError);
  });
});

describe("complex formatting", () => {
  const cases: Array<[[number, number], string]> = [
    [[0.5, 0], "0.5"],
    [[0.25, 0.3], "0.25 + 0.3i"],
    [[-0.125, -2], "-0.125 − 2.0i"],
    [[1, 0.000001], "1.0 + 0.000001i"],
  ];
  it.each(cases)("formats %j", (pair, want) => {
    expect(formatComplex(pair)).toBe(want);
  });
});

describe("retarget readout", () => {
  function surgeryResult(residual: number): SurgeryResult {
    return {
      a_k: [1.5, 0],
      b_k: [0.5, 0],
      dilatation: 2,
      measured_multiplier: [0.25000000012, 0],
      kappa_requested: [0.25, 0],
      kappa0: [0.5, 0],
      m: 0,
      Lambda: -1.3862943611198906,
      rho: 0,
      residuals: { retarget: residual },
      map_hash: "b".repeat(64),
    };
  }

  it("shows measured vs requested and flags a hit", () => {
    const m = retargetModel(surgeryResult(1.2e-10));
    expect(m.requested).toBe("0.25");
    expect(m.measured).toBe("0.25");
    expect(m.matched).toBe(true);
    expect(m.residual).toBe("1.20e-10");
  });

  it("flags a miss beyond the tolerance", () => {
    expect(retargetModel(surgeryResult(3e-4)).matched).toBe(false);
  });
});

describe("theta scrub debounce", () => {
  it("fires once, trailing edge, after the wait", () => {
    vi.useFakeTimers();
    try {
      const calls: number[] = [];
      const fn = debounce((v: number) => calls.push(v), 100);
      fn(1);
      vi.advanceTimersByTime(60);
      fn(2);
      vi.advanceTimersByTime(60);
      fn(3);
      expect(calls).toEqual([]);
      vi.advanceTimersByTime(100);
      expect(calls).toEqual([3]);
    } finally {
      vi.useRealTimers();
    }
  });
});
