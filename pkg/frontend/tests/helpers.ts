import { vi } from "vitest";
import type { GlyphRef, Grouping, ModelRecord } from "../src/api.js";

export function makeModel(
  id: string,
  overrides: Partial<ModelRecord> = {},
): ModelRecord {
  return {
    id,
    seed: 1,
    outlier_pct: 0.6,
    typical_pct: 0.8,
    hidden_layers: 1,
    dropout: false,
    activation: "relu",
    batch_size: 128,
    optimizer: "adam",
    use_validation: true,
    dx: 0,
    dy: 0,
    rotation_deg: 0,
    contrast_factor: 1.0,
    contrast_proportion: 0.0,
    inversion_proportion: 0.0,
    test_accuracy: 0.91,
    epochs_trained: 12,
    weights_path: `weights/${id}.w1`,
    weights_hash: "0".repeat(64),
    status: "ok",
    created_at: "2026-08-26T00:00:00+00:00",
    ...overrides,
  };
}

/** Grouping with every digit bucket present, from label -> members. */
export function makeGrouping(
  assignments: Record<number, GlyphRef[]>,
): Grouping {
  const grouping: Grouping = {};
  for (let label = 0; label < 10; label++) {
    grouping[String(label)] = assignments[label] ?? [];
  }
  return grouping;
}

export interface CapturedRequest {
  url: string;
  method: string;
  body?: string;
}

/** Replaces global fetch with a router; returns the captured requests. */
export function mockFetch(
  routes: Record<string, (req: CapturedRequest) => { status?: number; json: unknown }>,
): CapturedRequest[] {
  const captured: CapturedRequest[] = [];
  globalThis.fetch = vi.fn(async (input: unknown, init?: RequestInit) => {
    const url = String(input);
    const req: CapturedRequest = {
      url,
      method: init?.method ?? "GET",
      body: init?.body === undefined ? undefined : String(init.body),
    };
    captured.push(req);
    const path = url.split("?")[0];
    const route = routes[`${req.method} ${path}`];
    if (!route) {
      return new Response("not found", { status: 404 });
    }
    const result = route(req);
    return new Response(JSON.stringify(result.json), {
      status: result.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
  return captured;
}
