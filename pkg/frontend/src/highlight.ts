/** In-document highlighting: the abstract is rebuilt from the API's
 * sentence rows in document order, so boundaries always match the
 * server's segmentation (never re-segmented client-side). */

import type { RelevanceArticle } from "./types.js";

export function renderHighlightedDocument(article: RelevanceArticle): HTMLElement {
  const container = document.createElement("p");
  container.className = "document";
  container.dataset.pmid = article.pmid;
  const inOrder = [...article.sentences].sort((a, b) => a.index - b.index);
  inOrder.forEach((sentence, position) => {
    if (position > 0) container.appendChild(document.createTextNode(" "));
    const span = document.createElement("span");
    span.textContent = sentence.text;
    span.dataset.index = String(sentence.index);
    span.dataset.score = String(sentence.score);
    if (sentence.selected) span.classList.add("highlight");
    container.appendChild(span);
  });
  return container;
}
