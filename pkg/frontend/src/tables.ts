/** DOM builders for the three result tables. Every numeric cell carries
 * the raw API value in data-value and shows a fixed-precision rendering
 * of that same value; nothing is recomputed client-side. */

import type { EntityRow, RelevanceArticle, SummaryRow } from "./types.js";

export function formatScore(value: number): string {
  return value.toFixed(3);
}

function cell(text: string, value?: number): HTMLTableCellElement {
  const td = document.createElement("td");
  td.textContent = text;
  if (value !== undefined) {
    td.dataset.value = String(value);
    td.classList.add("num");
  }
  return td;
}

function headerRow(labels: string[]): HTMLTableRowElement {
  const tr = document.createElement("tr");
  for (const label of labels) {
    const th = document.createElement("th");
    th.textContent = label;
    tr.appendChild(th);
  }
  return tr;
}

export function renderSummariesTable(rows: SummaryRow[]): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "summaries";
  table.createTHead().appendChild(headerRow(["PMID", "Title", "Journal", "Summary Score"]));
  const body = table.createTBody();
  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.dataset.pmid = row.pmid;
    tr.appendChild(cell(row.pmid));
    tr.appendChild(cell(row.title));
    tr.appendChild(cell(row.journal));
    tr.appendChild(cell(formatScore(row.summary_score), row.summary_score));
    tr.title = row.summary_text;
    body.appendChild(tr);
  }
  return table;
}

/** Ranked sentence list for one article (highest relevance first). */
export function renderRelevanceTable(article: RelevanceArticle): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "relevance";
  table.dataset.pmid = article.pmid;
  table.createTHead().appendChild(headerRow(["Rank", "Score", "Sentence"]));
  const body = table.createTBody();
  const ranked = [...article.sentences].sort((a, b) => a.rank - b.rank);
  for (const sentence of ranked) {
    const tr = document.createElement("tr");
    if (sentence.selected) tr.classList.add("selected");
    tr.appendChild(cell(String(sentence.rank), sentence.rank));
    tr.appendChild(cell(formatScore(sentence.score), sentence.score));
    tr.appendChild(cell(sentence.text));
    body.appendChild(tr);
  }
  return table;
}

export function renderEntitiesTable(rows: EntityRow[]): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "entities";
  table.createTHead().appendChild(headerRow(["Type", "Entity", "Score", "Count"]));
  const body = table.createTBody();
  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.dataset.label = row.label;
    tr.appendChild(cell(row.label));
    tr.appendChild(cell(row.text));
    tr.appendChild(cell(formatScore(row.best_score), row.best_score));
    tr.appendChild(cell(String(row.count), row.count));
    body.appendChild(tr);
  }
  return table;
}

/** Entities grouped into one table per label, preserving server order. */
export function renderEntitiesByLabel(rows: EntityRow[]): Map<string, HTMLTableElement> {
  const groups = new Map<string, EntityRow[]>();
  for (const row of rows) {
    const bucket = groups.get(row.label) ?? [];
    bucket.push(row);
    groups.set(row.label, bucket);
  }
  const tables = new Map<string, HTMLTableElement>();
  for (const [label, bucket] of groups) {
    tables.set(label, renderEntitiesTable(bucket));
  }
  return tables;
}
