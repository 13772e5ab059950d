/** Wizard view state with navigation guards: steps past 1 need at least
 * one saved query, step 4 needs a completed run. */

export type Step = 1 | 2 | 3 | 4;

export interface ViewState {
  step: Step;
  queryCount: number;
  activeQuery: string | null;
  activeRun: string | null;
  k: number;
  threshold: number;
  summarySort: "score" | "pmid";
}

export function initialState(): ViewState {
  return {
    step: 1,
    queryCount: 0,
    activeQuery: null,
    activeRun: null,
    k: 4,
    threshold: 0.5,
    summarySort: "score",
  };
}

export function canEnter(step: Step, state: ViewState): boolean {
  if (step >= 2 && state.queryCount < 1) return false;
  if (step >= 3 && state.activeQuery === null) return false;
  if (step === 4 && state.activeRun === null) return false;
  return true;
}

/** Move to a step when its guard allows it; otherwise stay put. */
export function goTo(state: ViewState, step: Step): ViewState {
  if (!canEnter(step, state)) return state;
  return { ...state, step };
}

export function withQueries(state: ViewState, count: number): ViewState {
  const next = { ...state, queryCount: count };
  // losing the last query invalidates anything past step 1
  if (count < 1 && state.step > 1) return { ...next, step: 1 as Step };
  return next;
}

export function selectQuery(state: ViewState, name: string): ViewState {
  return { ...state, activeQuery: name };
}

export function runStarted(state: ViewState, runId: string): ViewState {
  return { ...state, activeRun: runId };
}

export function setK(state: ViewState, k: number): ViewState {
  if (!Number.isInteger(k) || k < 1) return state;
  return { ...state, k };
}

export function setThreshold(state: ViewState, threshold: number): ViewState {
  if (!(threshold >= 0 && threshold <= 1)) return state;
  return { ...state, threshold };
}
