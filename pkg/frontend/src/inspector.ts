/**
 * Inspector panel view-models.
 *
 * Pure formatting of service responses: fixed-width rendering of the
 * numbers the service returned, badge selection, error surfacing. No
 * arithmetic happens here beyond choosing how many digits to print.
 */

import { ApiError, isOffline } from "./api.js";
import type { ClassifyResult, SurgeryResult } from "./api.js";

export const NO_KAPPA_BADGE = "no κ̂ (winding ≠ 0)";

/** Display form of a service [re, im] pair. */
export function formatComplex(pair: [number, number], digits = 6): string {
  const [re, im] = pair;
  const r = trimmed(re, digits);
  if (im === 0) return r;
  const i = trimmed(Math.abs(im), digits);
  return im < 0 ? `${r} − ${i}i` : `${r} + ${i}i`;
}

function trimmed(x: number, digits: number): string {
  const fixed = x.toFixed(digits);
  // drop trailing zeros but keep at least one decimal digit
  return fixed.replace(/(\.\d*?)0+$/, "$1").replace(/\.$/, ".0");
}

export interface InspectorModel {
  kind: "ready" | "domain-error" | "offline";
  /** κ̂ as returned by the service, formatted; null when winding ≠ 0. */
  kappaHat: string | null;
  /** Badge shown instead of κ̂ when it does not exist. */
  badge: string | null;
  lyapunov: string | null;
  rho: string | null;
  winding: number | null;
  member: boolean | null;
  flags: string[];
  error: { code: string; message: string } | null;
}

const EMPTY: Omit<InspectorModel, "kind"> = {
  kappaHat: null,
  badge: null,
  lyapunov: null,
  rho: null,
  winding: null,
  member: null,
  flags: [],
  error: null,
};

export function inspectorFromClassify(r: ClassifyResult): InspectorModel {
  const flags: string[] = [];
  if (r.critical_orbit_bounded) flags.push("critical orbit bounded");
  if (r.critical_orbit_converges_to_zero) flags.push("critical orbit → 0");
  return {
    ...EMPTY,
    kind: "ready",
    kappaHat: r.kappa_hat === null ? null : formatComplex(r.kappa_hat),
    badge: r.kappa_hat === null ? NO_KAPPA_BADGE : null,
    lyapunov: trimmed(r.lyapunov, 6),
    rho: r.rho === null ? null : trimmed(r.rho, 6),
    winding: r.winding,
    member: r.in_H0star,
    flags,
  };
}

/** Map a thrown error to the panel state: 422 badge or offline retry. */
export function inspectorFromError(err: unknown): InspectorModel {
  if (err instanceof ApiError) {
    return {
      ...EMPTY,
      kind: "domain-error",
      error: { code: err.code, message: err.message },
    };
  }
  if (isOffline(err)) {
    return {
      ...EMPTY,
      kind: "offline",
      error: { code: "offline", message: "service unreachable; retry" },
    };
  }
  throw err; // programming error: let it surface
}

export interface RetargetModel {
  requested: string;
  measured: string;
  residual: string;
  dilatation: string;
  matched: boolean;
}

/** Measured-vs-requested readout for the retarget control. */
export function retargetModel(r: SurgeryResult, tol = 1e-6): RetargetModel {
  return {
    requested: formatComplex(r.kappa_requested),
    measured: formatComplex(r.measured_multiplier),
    residual: r.residuals.retarget.toExponential(2),
    dilatation: trimmed(r.dilatation, 4),
    matched: r.residuals.retarget < tol,
  };
}
