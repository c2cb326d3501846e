/** Node inspector panel: name, labels, and the property table for the
 * node selected in the graph view.
 */

import { displayName } from "./graphView.js";
import type { GraphNodePayload } from "./types.js";

export function renderInspector(container: HTMLElement, node: GraphNodePayload | null): void {
  container.textContent = "";
  container.classList.add("inspector");

  if (!node) {
    const empty = document.createElement("p");
    empty.className = "inspector-empty";
    empty.textContent = "Select a node to inspect it.";
    container.appendChild(empty);
    return;
  }

  const title = document.createElement("h3");
  title.className = "inspector-title";
  title.textContent = displayName(node);
  container.appendChild(title);

  const idLine = document.createElement("p");
  idLine.className = "inspector-id";
  idLine.textContent = node.id;
  container.appendChild(idLine);

  const labels = document.createElement("div");
  labels.className = "inspector-labels";
  for (const label of node.labels) {
    const chip = document.createElement("span");
    chip.className = "label-chip";
    chip.textContent = label;
    labels.appendChild(chip);
  }
  container.appendChild(labels);

  const entries = Object.entries(node.properties);
  if (entries.length === 0) {
    const none = document.createElement("p");
    none.className = "inspector-empty";
    none.textContent = "No properties.";
    container.appendChild(none);
    return;
  }

  const table = document.createElement("table");
  table.className = "inspector-props";
  for (const [key, value] of entries.sort(([a], [b]) => a.localeCompare(b))) {
    const row = document.createElement("tr");
    const keyCell = document.createElement("td");
    keyCell.className = "prop-key";
    keyCell.textContent = key;
    const valueCell = document.createElement("td");
    valueCell.className = "prop-value";
    valueCell.textContent = String(value);
    row.appendChild(keyCell);
    row.appendChild(valueCell);
    table.appendChild(row);
  }
  container.appendChild(table);
}
