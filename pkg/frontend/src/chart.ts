// Stacked bar chart of glyphs, one bar per digit. Bar contents mirror the
// grouping response exactly; filters can only hide members, never invent
// them, so the visible total always equals the (filtered) member count.

import { glyphUrl, type Grouping, type ModelRecord } from "./api.js";

export interface Bar {
  label: number;
  glyphs: Array<{ modelId: string; confidence: number }>;
}

export interface ChartViewModel {
  bars: Bar[]; // always ten, keyed 0..9
  memberCount: number;
}

export function buildViewModel(
  grouping: Grouping,
  visible?: Set<string>,
): ChartViewModel {
  const bars: Bar[] = [];
  let memberCount = 0;
  for (let label = 0; label < 10; label++) {
    const bucket = grouping[String(label)] ?? [];
    const glyphs = bucket
      .filter((g) => visible === undefined || visible.has(g.model_id))
      .map((g) => ({ modelId: g.model_id, confidence: g.confidence }));
    memberCount += glyphs.length;
    bars.push({ label, glyphs });
  }
  return { bars, memberCount };
}

function glyphTitle(modelId: string, confidence: number, meta?: ModelRecord): string {
  const lines = [`${modelId}  confidence ${confidence.toFixed(3)}`];
  if (meta) {
    lines.push(
      `activation ${meta.activation}, optimizer ${meta.optimizer}`,
      `hidden layers ${meta.hidden_layers}, batch ${meta.batch_size}, dropout ${meta.dropout}`,
      `outliers ${meta.outlier_pct}, typicals ${meta.typical_pct}`,
      `augmentation: dx ${meta.dx} dy ${meta.dy} rot ${meta.rotation_deg}° ` +
        `contrast ${meta.contrast_factor}@${meta.contrast_proportion} ` +
        `inversion ${meta.inversion_proportion}`,
      `test accuracy ${meta.test_accuracy ?? "n/a"}`,
    );
  }
  return lines.join("\n");
}

export function renderBarChart(
  container: HTMLElement,
  view: ChartViewModel,
  metadata: Map<string, ModelRecord> = new Map(),
): void {
  container.innerHTML = "";
  container.classList.remove("chart-error");
  if (view.memberCount === 0) {
    const empty = document.createElement("p");
    empty.className = "chart-empty";
    empty.textContent = "No models meet the current accuracy bound.";
    container.append(empty);
    return;
  }
  const chart = document.createElement("div");
  chart.className = "glyph-chart";
  for (const bar of view.bars) {
    const column = document.createElement("div");
    column.className = "glyph-bar";
    column.dataset.label = String(bar.label);
    column.dataset.count = String(bar.glyphs.length);
    for (const glyph of bar.glyphs) {
      const img = document.createElement("img");
      img.className = "glyph";
      img.src = glyphUrl(glyph.modelId, glyph.confidence);
      img.dataset.modelId = glyph.modelId;
      img.title = glyphTitle(glyph.modelId, glyph.confidence,
        metadata.get(glyph.modelId));
      column.append(img);
    }
    const axisLabel = document.createElement("span");
    axisLabel.className = "axis-label";
    axisLabel.textContent = String(bar.label);
    column.append(axisLabel);
    chart.append(column);
  }
  container.append(chart);
}

export function renderChartError(container: HTMLElement, message: string): void {
  container.innerHTML = "";
  container.classList.add("chart-error");
  const p = document.createElement("p");
  p.textContent = message;
  container.append(p);
}
