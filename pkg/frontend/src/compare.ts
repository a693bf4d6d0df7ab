import { glyphUrl, type ModelRecord } from "./api.js";

const COMPARED_FIELDS: Array<keyof ModelRecord> = [
  "outlier_pct", "typical_pct", "hidden_layers", "dropout", "activation",
  "batch_size", "optimizer", "use_validation", "dx", "dy", "rotation_deg",
  "contrast_factor", "contrast_proportion", "inversion_proportion",
  "test_accuracy", "epochs_trained",
];

export interface FieldDiff {
  field: string;
  a: unknown;
  b: unknown;
  differs: boolean;
}

export function diffModels(a: ModelRecord, b: ModelRecord): FieldDiff[] {
  return COMPARED_FIELDS.map((field) => ({
    field: String(field),
    a: a[field],
    b: b[field],
    differs: a[field] !== b[field],
  }));
}

export function renderComparison(
  container: HTMLElement,
  a: ModelRecord,
  b: ModelRecord,
): void {
  container.innerHTML = "";
  const header = document.createElement("div");
  header.className = "compare-glyphs";
  for (const model of [a, b]) {
    const img = document.createElement("img");
    img.className = "glyph";
    img.src = glyphUrl(model.id);
    img.title = model.id;
    header.append(img);
  }
  container.append(header);

  const table = document.createElement("table");
  table.className = "compare-table";
  for (const row of diffModels(a, b)) {
    const tr = document.createElement("tr");
    if (row.differs) tr.classList.add("diff");
    for (const text of [row.field, String(row.a), String(row.b)]) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.append(td);
    }
    table.append(tr);
  }
  container.append(table);
}
