/**
 * DOM wiring for the explorer. Everything numeric on screen comes from a
 * service response; this file only routes events and positions images.
 */

import { ApiClient } from "./api.js";
import type { MetaResponse } from "./api.js";
import { debounce, THETA_SCRUB_DEBOUNCE_MS } from "./debounce.js";
import {
  inspectorFromClassify,
  inspectorFromError,
  retargetModel,
  type InspectorModel,
} from "./inspector.js";
import {
  cellMapDescriptor,
  decodeViewState,
  defaultViewState,
  encodeViewState,
  MAX_SLIDERS,
  sliceBody,
  tileRect,
  visibleTiles,
  type ViewState,
} from "./state.js";
import { TileFetcher, tileKey, type TileSlot } from "./tiles.js";

const LEGEND = ["invalid", "winding ≠ 0", "non-member", "member"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

class Explorer {
  api = new ApiClient("");
  state: ViewState;
  meta: MetaResponse | null = null;
  fetcher: TileFetcher;
  fiberAbort: AbortController | null = null;
  mapHandle: string | null = null; // registry handle of the inspected map

  board: HTMLDivElement;
  statusBar: HTMLDivElement;
  panel: HTMLDivElement;
  fiberImg: HTMLImageElement;
  fiberStats: HTMLDivElement;
  retargetOut: HTMLDivElement;
  urls = new Map<string, string>(); // tile key -> object URL

  constructor(private root: HTMLElement) {
    this.state = this.restoreState();
    this.fetcher = new TileFetcher(this.api, { maxInflight: 8 });
    this.fetcher.onUpdate((slot) => this.renderTile(slot));
    this.board = el("div", { id: "board" });
    this.statusBar = el("div", { id: "status" });
    this.panel = el("div", { id: "inspector" });
    this.fiberImg = el("img", { id: "fiber", alt: "Julia fiber" });
    this.fiberStats = el("div", { id: "fiber-stats" });
    this.retargetOut = el("div", { id: "retarget-out" });
  }

  restoreState(): ViewState {
    try {
      return decodeViewState(location.hash);
    } catch {
      return defaultViewState();
    }
  }

  pushState(): void {
    history.replaceState(null, "", `#${encodeViewState(this.state)}`);
  }

  async start(): Promise<void> {
    this.buildLayout();
    try {
      this.meta = await this.api.meta();
      this.statusBar.textContent = `${this.meta.name} ${this.meta.version}`;
      this.buildLegend();
    } catch {
      this.statusBar.textContent = "service unreachable; reload to retry";
      return;
    }
    if (this.state.slice) {
      this.syncTiles();
    } else {
      await this.registerSlice();
    }
    if (this.state.selected) void this.inspect(this.state.selected.s, this.state.selected.t);
  }

  // -- layout -------------------------------------------------------------

  buildLayout(): void {
    const controls = el("div", { id: "controls" });

    const alphaSel = el("select", { id: "alpha" });
    alphaSel.addEventListener("change", () => {
      this.state.alphaPreset = alphaSel.value;
      void this.registerSlice();
    });
    controls.append(el("label", {}, "α preset "), alphaSel);

    const sliderBox = el("div", { id: "sliders" });
    for (let i = 0; i < MAX_SLIDERS; i++) {
      const row = el("div", { class: "slider-row" });
      const mode = el("input", { type: "number", step: "1", placeholder: "mode" });
      const re = el("input", { type: "number", step: "0.05", placeholder: "re" });
      const im = el("input", { type: "number", step: "0.05", placeholder: "im" });
      const existing = this.state.sliders[i];
      if (existing) {
        mode.value = String(existing.mode);
        re.value = String(existing.re);
        im.value = String(existing.im);
      }
      const apply = () => {
        const sliders = [];
        for (const r of sliderBox.querySelectorAll(".slider-row")) {
          const [m, rr, ii] = [...r.querySelectorAll("input")].map((x) => x.value);
          if (m === "" || (rr === "" && ii === "")) continue;
          sliders.push({ mode: Number(m), re: Number(rr || "0"), im: Number(ii || "0") });
        }
        this.state.sliders = sliders;
        void this.registerSlice();
      };
      for (const input of [mode, re, im]) input.addEventListener("change", apply);
      row.append(mode, re, im);
      sliderBox.append(row);
    }
    controls.append(el("label", {}, "λ coefficients"), sliderBox);

    const zo = el("button", {}, "−");
    const zi = el("button", {}, "+");
    zo.addEventListener("click", () => this.setZoom(this.state.zoom - 1));
    zi.addEventListener("click", () => this.setZoom(this.state.zoom + 1));
    controls.append(el("label", {}, "zoom "), zo, zi);

    const retry = el("button", { id: "retry" }, "retry failed tiles");
    retry.addEventListener("click", () => this.fetcher.retryErrors());
    controls.append(retry);

    this.board.addEventListener("click", (ev) => this.onBoardClick(ev));

    const theta = el("input", {
      id: "theta",
      type: "range",
      min: "0",
      max: "1",
      step: "0.001",
      value: String(this.state.theta),
    });
    const scrub = debounce((value: number) => {
      this.state.theta = value;
      this.pushState();
      void this.loadFiber();
    }, THETA_SCRUB_DEBOUNCE_MS);
    theta.addEventListener("input", () => scrub(Number(theta.value)));

    const budget = el("input", {
      id: "budget",
      type: "number",
      min: "1",
      value: String(this.state.budget),
    });
    budget.addEventListener("change", () => {
      this.state.budget = Math.max(1, Number(budget.value) || 200);
      this.pushState();
      void this.loadFiber();
    });

    const kre = el("input", { id: "kre", type: "number", step: "0.05", value: "0.25" });
    const kim = el("input", { id: "kim", type: "number", step: "0.05", value: "0" });
    const retarget = el("button", { id: "retarget" }, "retarget multiplier");
    retarget.addEventListener("click", () => void this.retarget(Number(kre.value), Number(kim.value)));

    const inspectorBox = el("div", { id: "inspector-box" });
    inspectorBox.append(
      el("h2", {}, "inspector"),
      this.panel,
      el("label", {}, "θ "),
      theta,
      el("label", {}, "budget "),
      budget,
      this.fiberImg,
      this.fiberStats,
      el("h3", {}, "retarget κ"),
      kre,
      kim,
      retarget,
      this.retargetOut,
    );

    this.root.append(controls, this.statusBar, this.board, inspectorBox);
  }

  buildLegend(): void {
    if (!this.meta) return;
    const legend = el("div", { id: "legend" });
    this.meta.palette.forEach((rgb, i) => {
      const chip = el("span", { class: "chip" });
      chip.style.background = `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
      legend.append(chip, el("span", {}, LEGEND[i] ?? `class ${i}`));
    });
    this.statusBar.append(legend);
    const alphaSel = this.root.querySelector<HTMLSelectElement>("#alpha");
    if (alphaSel) {
      for (const name of Object.keys(this.meta.alpha_presets)) {
        alphaSel.append(el("option", { value: name }, name));
      }
      alphaSel.value = this.state.alphaPreset;
    }
  }

  // -- slice & tiles ------------------------------------------------------

  async registerSlice(): Promise<void> {
    try {
      const reg = await this.api.registerSlice(sliceBody(this.state));
      this.state.slice = reg.slice;
      this.state.rect = reg.rect;
      this.pushState();
      this.syncTiles();
    } catch (err) {
      this.renderInspector(inspectorFromError(err));
    }
  }

  setZoom(zoom: number): void {
    this.state.zoom = Math.max(0, Math.min(24, zoom));
    this.pushState();
    this.syncTiles();
  }

  syncTiles(): void {
    this.fetcher.setViewport(visibleTiles(this.state));
  }

  tileStyle(slot: TileSlot): string {
    // place the tile by its share of the viewport (display scaling only)
    const r = tileRect(this.state.rect, slot.req.x, slot.req.y, slot.req.zoom);
    const v = this.state.view;
    const left = ((r.s0 - v.s0) / (v.s1 - v.s0)) * 100;
    const top = ((v.t1 - r.t1) / (v.t1 - v.t0)) * 100;
    const w = ((r.s1 - r.s0) / (v.s1 - v.s0)) * 100;
    const h = ((r.t1 - r.t0) / (v.t1 - v.t0)) * 100;
    return `left:${left}%;top:${top}%;width:${w}%;height:${h}%`;
  }

  renderTile(slot: TileSlot): void {
    const id = `tile-${slot.key.replace(/[^a-zA-Z0-9]/g, "-")}`;
    let node = document.getElementById(id);
    if (!this.fetcher.get(slot.key)) {
      node?.remove();
      return;
    }
    if (!node) {
      node = el("div", { id, class: "tile" });
      this.board.append(node);
    }
    node.setAttribute("style", this.tileStyle(slot));
    node.classList.toggle("stale", slot.status !== "fresh" && slot.data !== null);
    node.classList.toggle("errored", slot.status === "error");
    if (slot.data) {
      let img = node.querySelector("img");
      if (!img) {
        img = el("img", { alt: "" });
        node.append(img);
      }
      const old = this.urls.get(slot.key);
      if (old) URL.revokeObjectURL(old);
      const url = URL.createObjectURL(slot.data.blob);
      this.urls.set(slot.key, url);
      img.src = url;
    }
    let badge = node.querySelector(".badge");
    if (slot.error) {
      if (!badge) {
        badge = el("span", { class: "badge" });
        node.append(badge);
      }
      badge.textContent = slot.error.offline ? "offline: retry" : slot.error.code;
    } else {
      badge?.remove();
    }
  }

  // -- inspector ----------------------------------------------------------

  onBoardClick(ev: MouseEvent): void {
    const rect = this.board.getBoundingClientRect();
    const fx = (ev.clientX - rect.left) / rect.width;
    const fy = (ev.clientY - rect.top) / rect.height;
    const v = this.state.view;
    const s = v.s0 + fx * (v.s1 - v.s0);
    const t = v.t1 - fy * (v.t1 - v.t0);
    this.state.selected = { s, t };
    this.pushState();
    void this.inspect(s, t);
  }

  async inspect(s: number, t: number): Promise<void> {
    this.panel.textContent = "classifying…";
    try {
      const result = await this.api.classify({ map: cellMapDescriptor(this.state, s, t) });
      this.mapHandle = result.map_hash;
      this.renderInspector(inspectorFromClassify(result));
      void this.loadFiber();
    } catch (err) {
      this.renderInspector(inspectorFromError(err));
    }
  }

  renderInspector(model: InspectorModel): void {
    this.panel.replaceChildren();
    if (model.error) {
      const badge = el("div", { class: model.kind === "offline" ? "badge retry" : "badge" });
      badge.textContent =
        model.kind === "offline"
          ? `offline: ${model.error.message}`
          : `${model.error.code}: ${model.error.message}`;
      this.panel.append(badge);
      return;
    }
    const rows: [string, string][] = [];
    rows.push(["κ̂", model.kappaHat ?? "n/a"]);
    if (model.badge) rows.push(["", model.badge]);
    if (model.lyapunov !== null) rows.push(["Λ", model.lyapunov]);
    if (model.rho !== null) rows.push(["ρ", model.rho]);
    if (model.winding !== null) rows.push(["winding", String(model.winding)]);
    if (model.member !== null) rows.push(["member", model.member ? "yes" : "no"]);
    for (const flag of model.flags) rows.push(["", flag]);
    for (const [k, v] of rows) {
      const row = el("div", { class: "row" });
      row.append(el("b", {}, k), el("span", {}, v));
      this.panel.append(row);
    }
  }

  async loadFiber(): Promise<void> {
    if (!this.mapHandle) return;
    this.fiberAbort?.abort();
    this.fiberAbort = new AbortController();
    try {
      const fiber = await this.api.fetchFiber(
        {
          map: this.mapHandle,
          theta: this.state.theta,
          width: 256,
          height: 256,
          budget: this.state.budget,
        },
        this.fiberAbort.signal,
      );
      const old = this.fiberImg.src;
      this.fiberImg.src = URL.createObjectURL(fiber.blob);
      if (old.startsWith("blob:")) URL.revokeObjectURL(old);
      if (fiber.stats) {
        this.fiberStats.textContent =
          `θ = ${fiber.stats.theta}  bounded fraction = ${fiber.stats.bounded_fraction}` +
          `  escape radius = ${fiber.stats.escape_radius}`;
      }
    } catch (err) {
      if (this.fiberAbort.signal.aborted) return;
      this.fiberStats.textContent = inspectorFromError(err).error?.message ?? "fiber failed";
    }
  }

  async retarget(re: number, im: number): Promise<void> {
    if (!this.state.selected) {
      this.retargetOut.textContent = "select a cell first";
      return;
    }
    const { s, t } = this.state.selected;
    this.retargetOut.textContent = "running surgery…";
    try {
      const result = await this.api.surgery({
        map: cellMapDescriptor(this.state, s, t),
        kappa: [re, im],
      });
      const m = retargetModel(result);
      this.retargetOut.textContent =
        `requested κ = ${m.requested}  measured κ = ${m.measured}` +
        `  |Δ| = ${m.residual}  K = ${m.dilatation}` +
        (m.matched ? "" : "  (off target)");
    } catch (err) {
      const model = inspectorFromError(err);
      this.retargetOut.textContent = model.error
        ? `${model.error.code}: ${model.error.message}`
        : "surgery failed";
    }
  }
}

// Browser entry point; absent under vitest's node environment.
if (typeof document !== "undefined" && document.getElementById("app")) {
  const explorer = new Explorer(document.getElementById("app")!);
  void explorer.start();
  addEventListener("hashchange", () => {
    explorer.state = explorer.restoreState();
    explorer.syncTiles();
  });
}

export { Explorer };
