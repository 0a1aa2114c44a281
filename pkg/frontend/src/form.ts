import type { EstimateStore } from "./store.js";
import type { EstimationResult, SchemaResponse } from "./types.js";

export interface RatingForm {
  root: HTMLElement;
  /** Push an API result into the readout and the multiplier table. */
  showResult(result: EstimationResult): void;
  showError(message: string): void;
  /** Move a factor's controls (used by sweep click-through). */
  setControls(factorId: string, rating: number): void;
}

function sliderFor(labels: string[], value: number): HTMLInputElement {
  const slider = document.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = String(labels.length - 1);
  slider.step = "0.01";
  slider.value = String(value);
  return slider;
}

export function renderRatingForm(
  schema: SchemaResponse,
  store: EstimateStore,
): RatingForm {
  const root = document.createElement("div");
  root.className = "rating-form";

  const readout = document.createElement("div");
  readout.className = "effort-readout";
  readout.innerHTML =
    '<span class="effort-label">effort</span> ' +
    '<span class="effort-value" data-role="effort">&ndash;</span> ' +
    '<span class="effort-unit">person-months</span>';
  const errorLine = document.createElement("p");
  errorLine.className = "form-error";
  errorLine.hidden = true;

  const sizeRow = document.createElement("label");
  sizeRow.className = "size-row";
  sizeRow.textContent = "size ";
  const sizeInput = document.createElement("input");
  sizeInput.type = "number";
  sizeInput.min = "0";
  sizeInput.step = "any";
  sizeInput.value = String(store.size);
  sizeInput.addEventListener("input", () => {
    const parsed = Number(sizeInput.value);
    if (Number.isFinite(parsed) && parsed > 0) store.setSize(parsed);
  });
  sizeRow.append(sizeInput);

  const controls = new Map<
    string,
    { select: HTMLSelectElement; slider: HTMLInputElement }
  >();
  const factorList = document.createElement("div");
  factorList.className = "factor-list";
  for (const factor of schema.factors) {
    const row = document.createElement("div");
    row.className = "factor-row";
    row.dataset.factor = factor.id;

    const name = document.createElement("label");
    name.className = "factor-name";
    name.textContent = factor.id;
    name.title = factor.name;

    const select = document.createElement("select");
    for (const label of factor.level_labels) {
      const option = document.createElement("option");
      option.value = label;
      option.textContent = label;
      select.append(option);
    }
    const initial = store.ratings[factor.id];
    const slider = sliderFor(factor.level_labels, Number(initial));
    if (Number.isInteger(initial)) select.selectedIndex = Number(initial);

    select.addEventListener("change", () => {
      slider.value = String(select.selectedIndex);
      store.setRating(factor.id, select.value);
    });
    slider.addEventListener("input", () => {
      const value = Number(slider.value);
      select.selectedIndex = Math.round(value);
      store.setRating(factor.id, value);
    });

    controls.set(factor.id, { select, slider });
    row.append(name, select, slider);
    factorList.append(row);
  }

  const levelIndex = new Map<string, Map<string, number>>();
  for (const factor of schema.factors) {
    levelIndex.set(
      factor.id,
      new Map(factor.level_labels.map((label, index) => [label, index])),
    );
  }

  const table = document.createElement("table");
  table.className = "multiplier-table";
  table.innerHTML =
    "<thead><tr><th>factor</th><th>multiplier</th><th>arf</th></tr></thead>";
  const tbody = document.createElement("tbody");
  for (const factor of schema.factors) {
    const row = document.createElement("tr");
    row.dataset.factor = factor.id;
    row.innerHTML =
      `<td>${factor.id}</td>` +
      '<td data-role="fm">&ndash;</td>' +
      '<td data-role="arf"></td>';
    tbody.append(row);
  }
  table.append(tbody);

  root.append(readout, errorLine, sizeRow, factorList, table);

  function showResult(result: EstimationResult): void {
    errorLine.hidden = true;
    const effort = root.querySelector('[data-role="effort"]');
    if (effort) effort.textContent = result.effort_pm.toFixed(2);
    for (const row of tbody.querySelectorAll<HTMLTableRowElement>("tr")) {
      const factorId = row.dataset.factor ?? "";
      const fm = result.multipliers[factorId];
      const fmCell = row.querySelector('[data-role="fm"]');
      if (fmCell && fm !== undefined) fmCell.textContent = fm.toFixed(4);
      const arf = result.arf[factorId];
      const raw = store.ratings[factorId];
      const arfCell = row.querySelector('[data-role="arf"]');
      if (arfCell && arf !== undefined) {
        // Only rule-adjusted ratings get a value in the arf column.
        const rawNumeric =
          typeof raw === "number"
            ? raw
            : (levelIndex.get(factorId)?.get(raw ?? "") ?? Number.NaN);
        const moved =
          !Number.isFinite(rawNumeric) || Math.abs(arf - rawNumeric) > 1e-9;
        arfCell.textContent = moved ? arf.toFixed(2) : "";
      }
    }
  }

  function showError(message: string): void {
    errorLine.textContent = message;
    errorLine.hidden = false;
  }

  function setControls(factorId: string, rating: number): void {
    const entry = controls.get(factorId);
    if (!entry) return;
    entry.slider.value = String(rating);
    entry.select.selectedIndex = Math.round(rating);
  }

  return { root, showResult, showError, setControls };
}
