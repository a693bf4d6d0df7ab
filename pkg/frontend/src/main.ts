// Dashboard entry point: browses test samples with their per-label glyph
// charts, filters and compares models, classifies hand-drawn digits and
// records feedback.

import { api, type ModelRecord } from "./api.js";
import { buildViewModel, renderBarChart, renderChartError } from "./chart.js";
import { renderComparison } from "./compare.js";
import { rasterizeStrokes, type Stroke } from "./draw.js";
import { setupFeedbackForm } from "./feedback.js";
import { filterModels } from "./filters.js";
import { stateFromQuery, stateToQuery, Store } from "./state.js";

const FILTERABLE_FIELDS = [
  "hidden_layers", "dropout", "activation", "batch_size", "optimizer",
  "use_validation", "outlier_pct", "typical_pct", "inversion_proportion",
] as const;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function start() {
  const store = new Store(stateFromQuery(location.search));
  const models = await api.models();
  const byId = new Map(models.map((m) => [m.id, m]));

  store.subscribe((state) => {
    history.replaceState(null, "", "?" + stateToQuery(state));
  });

  // --- sample browser + chart ---------------------------------------
  const chartHost = el<HTMLDivElement>("chart");
  const sampleImg = el<HTMLImageElement>("sample-image");
  const sampleLabel = el<HTMLSpanElement>("sample-label");

  async function refreshChart() {
    const { sampleIndex, epsilon, floor, filters } = store.get();
    try {
      const [grouping, page] = await Promise.all([
        api.sampleGroups(sampleIndex, epsilon, floor),
        api.samples(sampleIndex, 1),
      ]);
      const sample = page.samples[0];
      if (sample) {
        sampleImg.src = `data:image/png;base64,${sample.png_base64}`;
        sampleLabel.textContent = `sample ${sample.index}, true label ${sample.label}`;
      }
      const visible = Object.keys(filters).length
        ? filterModels(models, filters)
        : undefined;
      renderBarChart(chartHost, buildViewModel(grouping, visible), byId);
    } catch (err) {
      renderChartError(chartHost, `Could not load grouping: ${err}`);
    }
  }

  el<HTMLButtonElement>("prev-sample").onclick = () => {
    store.update({ sampleIndex: Math.max(0, store.get().sampleIndex - 1) });
  };
  el<HTMLButtonElement>("next-sample").onclick = () => {
    store.update({ sampleIndex: store.get().sampleIndex + 1 });
  };

  // --- filters -------------------------------------------------------
  const filterHost = el<HTMLDivElement>("filters");
  for (const field of FILTERABLE_FIELDS) {
    const values = [...new Set(models.map(
      (m) => (m as unknown as Record<string, unknown>)[field]))].sort();
    const fieldset = document.createElement("fieldset");
    const legend = document.createElement("legend");
    legend.textContent = field;
    fieldset.append(legend);
    for (const value of values) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = String(value);
      box.onchange = () => {
        const checked = [...fieldset.querySelectorAll("input:checked")].map(
          (input) => {
            const raw = (input as HTMLInputElement).value;
            if (raw === "true") return true;
            if (raw === "false") return false;
            const n = Number(raw);
            return Number.isNaN(n) ? raw : n;
          },
        );
        store.setFilter(field, checked);
      };
      label.append(box, String(value));
      fieldset.append(label);
    }
    filterHost.append(fieldset);
  }
  el<HTMLButtonElement>("clear-filters").onclick = () => store.clearFilters();

  // --- comparison ----------------------------------------------------
  const compareHost = el<HTMLDivElement>("comparison");
  const runComparison = () => {
    const a = byId.get(el<HTMLInputElement>("compare-a").value.trim());
    const b = byId.get(el<HTMLInputElement>("compare-b").value.trim());
    if (!a || !b) {
      compareHost.textContent = "Unknown model id.";
      return;
    }
    renderComparison(compareHost, a as ModelRecord, b as ModelRecord);
  };
  el<HTMLButtonElement>("compare-run").onclick = runComparison;

  // --- drawing pad ---------------------------------------------------
  const canvas = el<HTMLCanvasElement>("sketchpad");
  const ctx = canvas.getContext("2d")!;
  ctx.fillStyle = "black";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "white";
  ctx.lineWidth = canvas.width / 11;
  ctx.lineCap = "round";
  const strokes: Stroke[] = [];
  let drawing = false;

  canvas.onpointerdown = (event) => {
    drawing = true;
    strokes.push([{ x: event.offsetX, y: event.offsetY }]);
  };
  canvas.onpointermove = (event) => {
    if (!drawing) return;
    const stroke = strokes[strokes.length - 1];
    const prev = stroke[stroke.length - 1];
    stroke.push({ x: event.offsetX, y: event.offsetY });
    ctx.beginPath();
    ctx.moveTo(prev.x, prev.y);
    ctx.lineTo(event.offsetX, event.offsetY);
    ctx.stroke();
  };
  canvas.onpointerup = () => {
    drawing = false;
  };

  el<HTMLButtonElement>("clear-canvas").onclick = () => {
    strokes.length = 0;
    ctx.fillRect(0, 0, canvas.width, canvas.height);
  };

  const drawnChart = el<HTMLDivElement>("drawn-chart");
  el<HTMLButtonElement>("classify").onclick = async () => {
    try {
      const image = rasterizeStrokes(strokes, canvas.width);
      const grouping = await api.predict(image);
      renderBarChart(drawnChart, buildViewModel(grouping), byId);
    } catch (err) {
      renderChartError(drawnChart, `Prediction failed: ${err}`);
    }
  };

  // --- feedback ------------------------------------------------------
  setupFeedbackForm(
    el<HTMLFormElement>("feedback-form"),
    el<HTMLElement>("feedback-status"),
  );

  store.subscribe(() => void refreshChart());
  await refreshChart();
}

start().catch((err) => {
  document.body.textContent = `Dashboard failed to start: ${err}`;
});
