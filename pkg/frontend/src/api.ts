// Typed client for the workbench HTTP API. Every dashboard view goes
// through these calls; nothing else talks to the network.

export interface ModelRecord {
  id: string;
  seed: number;
  outlier_pct: number;
  typical_pct: number;
  hidden_layers: number;
  dropout: boolean;
  activation: string;
  batch_size: number;
  optimizer: string;
  use_validation: boolean;
  dx: number;
  dy: number;
  rotation_deg: number;
  contrast_factor: number;
  contrast_proportion: number;
  inversion_proportion: number;
  test_accuracy: number | null;
  epochs_trained: number | null;
  weights_path: string;
  weights_hash: string;
  status: string;
  created_at: string;
}

export interface GlyphRef {
  model_id: string;
  confidence: number;
}

/** Buckets keyed "0".."9", each an ordered list of member predictions. */
export type Grouping = Record<string, GlyphRef[]>;

export interface RashomonResponse {
  members: string[];
  epsilon: number;
  floor: number;
  reference_accuracy: number | null;
}

export interface Sample {
  index: number;
  label: number;
  png_base64: string;
  pixels: number[];
}

export interface FeedbackRecord {
  model_id: string;
  sample_id: string | number;
  verdict: "endorse" | "reject" | "unsure";
  note?: string;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(`API ${status}: ${detail}`);
  }
}

async function getJson<T>(url: string): Promise<T> {
  const res = await fetch(url);
  if (!res.ok) throw new ApiError(res.status, await res.text());
  return res.json() as Promise<T>;
}

async function postJson<T>(url: string, body: unknown): Promise<T> {
  const res = await fetch(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!res.ok) throw new ApiError(res.status, await res.text());
  return res.json() as Promise<T>;
}

export function glyphUrl(modelId: string, confidence?: number): string {
  const base = `/api/models/${modelId}/glyph.svg`;
  return confidence === undefined ? base : `${base}?confidence=${confidence}`;
}

export const api = {
  health: () => getJson<{ status: string }>("/api/health"),
  models: () => getJson<ModelRecord[]>("/api/models"),
  model: (id: string) => getJson<ModelRecord>(`/api/models/${id}`),
  rashomon: (epsilon?: number, floor?: number) => {
    const params = new URLSearchParams();
    if (epsilon !== undefined) params.set("epsilon", String(epsilon));
    if (floor !== undefined) params.set("floor", String(floor));
    const query = params.toString();
    return getJson<RashomonResponse>(`/api/rashomon${query ? "?" + query : ""}`);
  },
  samples: (offset = 0, limit = 20) =>
    getJson<{ total: number; samples: Sample[] }>(
      `/api/samples?offset=${offset}&limit=${limit}`,
    ),
  sampleGroups: (index: number, epsilon?: number, floor?: number) => {
    const params = new URLSearchParams();
    if (epsilon !== undefined) params.set("epsilon", String(epsilon));
    if (floor !== undefined) params.set("floor", String(floor));
    const query = params.toString();
    return getJson<Grouping>(
      `/api/samples/${index}/groups${query ? "?" + query : ""}`,
    );
  },
  predict: (image: Uint8Array) => {
    if (image.length !== 784) {
      throw new Error(`expected a 784-byte image, got ${image.length}`);
    }
    let binary = "";
    for (const byte of image) binary += String.fromCharCode(byte);
    return postJson<Grouping>("/api/predict", { image: btoa(binary) });
  },
  feedback: (record: FeedbackRecord) =>
    postJson<FeedbackRecord & { timestamp: string }>("/api/feedback", record),
};
