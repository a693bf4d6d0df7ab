// One store serializes every UI state change; views subscribe and the
// whole view is reconstructable from the URL query string.

export interface FilterCriteria {
  // per-field allowed value subsets; absent field = no constraint
  [field: string]: Array<string | number | boolean>;
}

export interface DashboardState {
  sampleIndex: number;
  epsilon: number;
  floor: number;
  filters: FilterCriteria;
}

export const DEFAULT_STATE: DashboardState = {
  sampleIndex: 0,
  epsilon: 0.05,
  floor: 0.85,
  filters: {},
};

type Listener = (state: DashboardState) => void;

export class Store {
  private state: DashboardState;
  private listeners: Listener[] = [];

  constructor(initial: DashboardState = DEFAULT_STATE) {
    this.state = { ...initial, filters: { ...initial.filters } };
  }

  get(): DashboardState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<DashboardState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  setFilter(field: string, values: Array<string | number | boolean>): void {
    const filters = { ...this.state.filters };
    if (values.length === 0) delete filters[field];
    else filters[field] = values;
    this.update({ filters });
  }

  clearFilters(): void {
    this.update({ filters: {} });
  }
}

export function stateToQuery(state: DashboardState): string {
  const params = new URLSearchParams();
  params.set("sample", String(state.sampleIndex));
  params.set("epsilon", String(state.epsilon));
  params.set("floor", String(state.floor));
  for (const [field, values] of Object.entries(state.filters)) {
    params.set(`f.${field}`, values.map(String).join(","));
  }
  return params.toString();
}

export function stateFromQuery(query: string): DashboardState {
  const params = new URLSearchParams(query);
  const state: DashboardState = {
    ...DEFAULT_STATE,
    filters: {},
  };
  const sample = params.get("sample");
  if (sample !== null) state.sampleIndex = Number(sample);
  const epsilon = params.get("epsilon");
  if (epsilon !== null) state.epsilon = Number(epsilon);
  const floor = params.get("floor");
  if (floor !== null) state.floor = Number(floor);
  for (const [key, raw] of params.entries()) {
    if (!key.startsWith("f.")) continue;
    const values = raw.split(",").map((v) => {
      if (v === "true") return true;
      if (v === "false") return false;
      const n = Number(v);
      return Number.isNaN(n) ? v : n;
    });
    state.filters[key.slice(2)] = values;
  }
  return state;
}
