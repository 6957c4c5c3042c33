/**
 * Tile fetch scheduling: bounded concurrency, cancellation on viewport
 * change, stale-tile bookkeeping, and per-tile error badges.
 *
 * The fetcher never interprets pixel data; it moves blobs and headers
 * between the service and the view layer.
 */

import { ApiClient, ApiError } from "./api.js";
import type { TileRequest, TileResponse } from "./api.js";

export type TileStatus = "queued" | "loading" | "fresh" | "stale" | "error";

export interface TileSlot {
  key: string;
  req: TileRequest;
  status: TileStatus;
  /** Response for fresh tiles; kept (greyed) while a replacement loads. */
  data: TileResponse | null;
  /** Badge for 422s and transport failures; null otherwise. */
  error: { code: string; message: string; offline: boolean } | null;
}

export function tileKey(req: TileRequest): string {
  const extra = [
    req.n_iter !== undefined ? `i${req.n_iter}` : "",
    req.n_theta !== undefined ? `t${req.n_theta}` : "",
  ].join("");
  return `${req.slice}/${req.zoom}/${req.x}/${req.y}${extra}`;
}

interface Pending {
  key: string;
  controller: AbortController;
}

export class TileFetcher {
  readonly maxInflight: number;
  /** Every request actually dispatched, in dispatch order. */
  readonly requestLog: TileRequest[] = [];

  private slots = new Map<string, TileSlot>();
  private queue: string[] = [];
  private pending = new Map<string, Pending>();
  private listeners: Array<(slot: TileSlot) => void> = [];

  constructor(
    private api: ApiClient,
    opts: { maxInflight?: number } = {},
  ) {
    this.maxInflight = opts.maxInflight ?? 8;
  }

  onUpdate(fn: (slot: TileSlot) => void): void {
    this.listeners.push(fn);
  }

  get(key: string): TileSlot | undefined {
    return this.slots.get(key);
  }

  all(): TileSlot[] {
    return [...this.slots.values()];
  }

  inflight(): number {
    return this.pending.size;
  }

  /**
   * Reconcile with the wanted tile set. Tiles no longer wanted are dropped
   * (in-flight fetches aborted); wanted tiles that are fresh stay; anything
   * else queues. Order of `wanted` is the fetch order.
   */
  setViewport(wanted: TileRequest[]): void {
    const want = new Map(wanted.map((r) => [tileKey(r), r]));

    for (const [key, p] of [...this.pending]) {
      if (!want.has(key)) {
        p.controller.abort();
        this.pending.delete(key);
      }
    }
    this.queue = this.queue.filter((k) => want.has(k));
    for (const key of [...this.slots.keys()]) {
      if (!want.has(key)) this.slots.delete(key);
    }

    for (const [key, req] of want) {
      const slot = this.slots.get(key);
      if (slot && (slot.status === "fresh" || slot.status === "loading")) continue;
      if (slot && slot.status === "queued") continue;
      this.slots.set(key, {
        key,
        req,
        status: "queued",
        data: slot?.data ?? null,
        error: null,
      });
      if (!this.queue.includes(key)) this.queue.push(key);
    }
    this.pump();
  }

  /** Mark every held tile stale and refetch it (slice or detail changed). */
  refresh(): void {
    for (const slot of this.slots.values()) {
      if (slot.status === "fresh") {
        slot.status = "stale";
        this.emit(slot);
      }
      if (!this.pending.has(slot.key) && !this.queue.includes(slot.key)) {
        this.queue.push(slot.key);
      }
    }
    this.pump();
  }

  /** Re-queue errored tiles (the retry badge action). */
  retryErrors(): void {
    for (const slot of this.slots.values()) {
      if (slot.status === "error" && !this.queue.includes(slot.key)) {
        slot.status = "queued";
        slot.error = null;
        this.queue.push(slot.key);
        this.emit(slot);
      }
    }
    this.pump();
  }

  private emit(slot: TileSlot): void {
    for (const fn of this.listeners) fn(slot);
  }

  private pump(): void {
    while (this.pending.size < this.maxInflight && this.queue.length > 0) {
      const key = this.queue.shift()!;
      const slot = this.slots.get(key);
      if (!slot || this.pending.has(key)) continue;
      this.start(slot);
    }
  }

  private start(slot: TileSlot): void {
    const controller = new AbortController();
    this.pending.set(slot.key, { key: slot.key, controller });
    if (slot.status !== "stale") slot.status = "loading";
    this.requestLog.push(slot.req);
    this.emit(slot);

    this.api
      .fetchTile(slot.req, controller.signal)
      .then((data) => {
        if (!this.pending.delete(slot.key)) return; // superseded
        const live = this.slots.get(slot.key);
        if (!live) return; // dropped while in flight
        live.data = data;
        live.status = "fresh";
        live.error = null;
        this.emit(live);
      })
      .catch((err: unknown) => {
        const wasPending = this.pending.delete(slot.key);
        const live = this.slots.get(slot.key);
        if (!wasPending || !live) return; // aborted or dropped
        if (controller.signal.aborted) return;
        live.status = "error";
        live.error =
          err instanceof ApiError
            ? { code: err.code, message: err.message, offline: false }
            : { code: "offline", message: "service unreachable; retry", offline: true };
        this.emit(live);
      })
      .finally(() => this.pump());
  }
}
