/** Wizard shell: create/name queries, pick one and harvest PMIDs,
 * launch a run, then explore the three result tables. */

import { ApiClient, ApiError } from "./api.js";
import { renderHighlightedDocument } from "./highlight.js";
import { pollRun } from "./poll.js";
import {
  ViewState,
  canEnter,
  goTo,
  initialState,
  runStarted,
  selectQuery,
  setK,
  setThreshold,
  withQueries,
} from "./state.js";
import {
  renderEntitiesByLabel,
  renderRelevanceTable,
  renderSummariesTable,
} from "./tables.js";
import type { Step } from "./state.js";
import type { RelevanceArticle } from "./types.js";

const api = new ApiClient("");
let state: ViewState = initialState();
let relevance: RelevanceArticle[] = [];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(message: string, isError = false) {
  const bar = el<HTMLElement>("status");
  bar.textContent = message;
  bar.classList.toggle("error", isError);
}

function showError(err: unknown) {
  if (err instanceof ApiError) setStatus(`${err.code}: ${err.message}`, true);
  else setStatus(String(err), true);
}

function renderNav() {
  for (const step of [1, 2, 3, 4] as Step[]) {
    const button = el<HTMLButtonElement>(`nav-${step}`);
    button.disabled = !canEnter(step, state);
    button.classList.toggle("active", state.step === step);
  }
  for (const step of [1, 2, 3, 4]) {
    el(`step-${step}`).hidden = state.step !== step;
  }
}

function navigate(step: Step) {
  state = goTo(state, step);
  renderNav();
}

// --- step 1: query builder ---

function builderPayload(): Record<string, unknown> {
  const mode = (el<HTMLSelectElement>("q-mode")).value;
  const payload: Record<string, unknown> = {
    disease: el<HTMLInputElement>("q-disease").value.trim(),
    name: el<HTMLInputElement>("q-name").value.trim() || null,
  };
  if (mode === "auto") {
    payload.cancer_defaults = el<HTMLInputElement>("q-cancer").checked;
    payload.use_default_terms = el<HTMLInputElement>("q-defaults").checked;
  } else {
    const parse = (id: string) =>
      el<HTMLTextAreaElement>(id)
        .value.split("\n")
        .map((line) => line.trim())
        .filter(Boolean)
        .map((line) =>
          line.endsWith(" [MeSH]")
            ? { text: line.slice(0, -" [MeSH]".length), is_mesh: true }
            : { text: line, is_mesh: false },
        );
    payload.interventions = parse("q-interventions");
    payload.outcomes = parse("q-outcomes");
    payload.synonyms = el<HTMLInputElement>("q-synonyms")
      .value.split(",")
      .map((s) => s.trim())
      .filter(Boolean);
  }
  return payload;
}

let previewTimer: ReturnType<typeof setTimeout> | undefined;

function schedulePreview() {
  clearTimeout(previewTimer);
  previewTimer = setTimeout(async () => {
    const payload = builderPayload();
    const saveButton = el<HTMLButtonElement>("q-save");
    if (!payload.disease) {
      el("q-preview").textContent = "";
      saveButton.disabled = true;
      return;
    }
    try {
      const preview = await api.previewQuery(payload);
      el("q-preview").textContent = preview.rendered;
      saveButton.disabled = false;
      setStatus("");
    } catch (err) {
      el("q-preview").textContent = "";
      saveButton.disabled = true;
      showError(err);
    }
  }, 250);
}

async function saveQuery() {
  try {
    const created = await api.createQuery(builderPayload());
    setStatus(`saved query ${created.name}`);
    await refreshQueries();
    state = selectQuery(state, created.name);
    navigate(2);
  } catch (err) {
    showError(err);
  }
}

// --- step 2: select + search ---

async function refreshQueries() {
  const queries = await api.listQueries();
  state = withQueries(state, queries.length);
  const select = el<HTMLSelectElement>("search-query");
  select.innerHTML = "";
  for (const query of queries) {
    const option = document.createElement("option");
    option.value = query.name;
    option.textContent = `${query.name} (${query.disease})`;
    select.appendChild(option);
  }
  if (state.activeQuery) select.value = state.activeQuery;
  renderNav();
}

async function runSearch() {
  const name = el<HTMLSelectElement>("search-query").value;
  state = selectQuery(state, name);
  try {
    const result = await api.search(
      name,
      Number(el<HTMLInputElement>("search-cap").value) || 100,
      el<HTMLInputElement>("search-offline").checked,
    );
    el("search-count").textContent =
      `${result.total_count} hits; showing ${result.pmids.length}`;
    const list = el("search-pmids");
    list.innerHTML = "";
    for (const pmid of result.pmids) {
      const li = document.createElement("li");
      li.textContent = pmid;
      list.appendChild(li);
    }
    renderNav();
  } catch (err) {
    showError(err);
  }
}

// --- step 3: launch ---

async function launchRun() {
  if (!state.activeQuery) return;
  const button = el<HTMLButtonElement>("run-launch");
  button.disabled = true;
  setStatus("running...");
  try {
    const { run_id } = await api.createRun({
      query_name: state.activeQuery,
      k: state.k,
      threshold: state.threshold,
      scorer: (el<HTMLSelectElement>("run-scorer")).value,
      offline: el<HTMLInputElement>("run-offline").checked,
    });
    await pollRun(api, run_id);
    state = runStarted(state, run_id);
    setStatus(`run ${run_id} complete`);
    await loadResults();
    navigate(4);
  } catch (err) {
    showError(err);
  } finally {
    button.disabled = false;
  }
}

// --- step 4: results ---

async function loadResults() {
  if (!state.activeRun) return;
  const [summaries, articles, entities] = await Promise.all([
    api.getSummaries(state.activeRun, state.summarySort),
    api.getRelevance(state.activeRun),
    api.getEntities(state.activeRun),
  ]);
  relevance = articles;

  const summariesBox = el("summaries-box");
  summariesBox.innerHTML = "";
  summariesBox.appendChild(renderSummariesTable(summaries));

  const picker = el<HTMLSelectElement>("article-picker");
  picker.innerHTML = "";
  for (const article of articles) {
    const option = document.createElement("option");
    option.value = article.pmid;
    option.textContent = `${article.pmid} ${article.title.slice(0, 60)}`;
    picker.appendChild(option);
  }
  renderArticle(articles[0]?.pmid);

  const entitiesBox = el("entities-box");
  entitiesBox.innerHTML = "";
  for (const [label, table] of renderEntitiesByLabel(entities)) {
    const heading = document.createElement("h3");
    heading.textContent = label;
    entitiesBox.appendChild(heading);
    entitiesBox.appendChild(table);
  }
}

function renderArticle(pmid: string | undefined) {
  const box = el("relevance-box");
  box.innerHTML = "";
  const article = relevance.find((a) => a.pmid === pmid);
  if (!article) return;
  box.appendChild(renderHighlightedDocument(article));
  box.appendChild(renderRelevanceTable(article));
}

/** Changing k re-summarizes server-side; cached articles are not
 * re-fetched, and every displayed score still comes from the API. */
async function applyK(k: number) {
  state = setK(state, k);
  el<HTMLInputElement>("k-value").value = String(state.k);
  if (!state.activeQuery || !state.activeRun) return;
  try {
    const { run_id } = await api.createRun({
      query_name: state.activeQuery,
      k: state.k,
      threshold: state.threshold,
      scorer: (el<HTMLSelectElement>("run-scorer")).value,
      offline: el<HTMLInputElement>("run-offline").checked,
    });
    state = runStarted(state, run_id);
    await loadResults();
  } catch (err) {
    showError(err);
  }
}

function bind() {
  for (const step of [1, 2, 3, 4] as Step[]) {
    el(`nav-${step}`).addEventListener("click", () => navigate(step));
  }
  el("q-mode").addEventListener("change", () => {
    const manual = (el<HTMLSelectElement>("q-mode")).value === "manual";
    el("manual-fields").hidden = !manual;
    el("auto-fields").hidden = manual;
    schedulePreview();
  });
  for (const id of ["q-disease", "q-name", "q-cancer", "q-defaults",
                    "q-interventions", "q-outcomes", "q-synonyms"]) {
    el(id).addEventListener("input", schedulePreview);
  }
  el("q-save").addEventListener("click", saveQuery);
  el("search-go").addEventListener("click", runSearch);
  el("run-launch").addEventListener("click", launchRun);
  el("article-picker").addEventListener("change", () =>
    renderArticle(el<HTMLSelectElement>("article-picker").value),
  );
  el("k-value").addEventListener("change", () =>
    applyK(Number(el<HTMLInputElement>("k-value").value)),
  );
  el("threshold-value").addEventListener("change", () => {
    state = setThreshold(state, Number(el<HTMLInputElement>("threshold-value").value));
  });
  el("sort-toggle").addEventListener("change", async () => {
    state.summarySort = (el<HTMLSelectElement>("sort-toggle")).value as "score" | "pmid";
    await loadResults();
  });
}

export async function boot() {
  bind();
  try {
    await refreshQueries();
  } catch (err) {
    showError(err);
  }
  renderNav();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
