import type { ModelRecord } from "./api.js";
import type { FilterCriteria } from "./state.js";

/** Ids of models whose config matches every active per-field value subset. */
export function filterModels(
  models: ModelRecord[],
  criteria: FilterCriteria,
): Set<string> {
  const matching = new Set<string>();
  for (const model of models) {
    let keep = true;
    for (const [field, allowed] of Object.entries(criteria)) {
      const value = (model as unknown as Record<string, unknown>)[field];
      if (!allowed.some((v) => v === value)) {
        keep = false;
        break;
      }
    }
    if (keep) matching.add(model.id);
  }
  return matching;
}
