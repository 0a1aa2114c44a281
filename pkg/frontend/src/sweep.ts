import { postWhatif } from "./api.js";
import { createSweepChart } from "./chart.js";
import type { EstimateStore } from "./store.js";
import type { SchemaResponse } from "./types.js";

export interface SweepPanel {
  root: HTMLElement;
}

export function createSweepPanel(
  schema: SchemaResponse,
  store: EstimateStore,
  onPick: (factorId: string, rating: number) => void,
): SweepPanel {
  const root = document.createElement("section");
  root.className = "sweep-panel";
  const heading = document.createElement("h2");
  heading.textContent = "What-if sweep";

  const factorPick = document.createElement("select");
  factorPick.dataset.role = "sweep-factor";
  for (const factor of schema.factors) {
    const option = document.createElement("option");
    option.value = factor.id;
    option.textContent = factor.id;
    factorPick.append(option);
  }

  const fromInput = document.createElement("input");
  fromInput.type = "number";
  fromInput.step = "any";
  fromInput.dataset.role = "sweep-from";
  const toInput = document.createElement("input");
  toInput.type = "number";
  toInput.step = "any";
  toInput.dataset.role = "sweep-to";

  function resetRange(): void {
    const factor = schema.factors.find((f) => f.id === factorPick.value);
    fromInput.value = "0";
    toInput.value = String(factor ? factor.level_labels.length - 1 : 1);
  }
  resetRange();
  factorPick.addEventListener("change", resetRange);

  const runButton = document.createElement("button");
  runButton.type = "button";
  runButton.dataset.role = "run-sweep";
  runButton.textContent = "Sweep";

  let sweptFactor = "";
  const chart = createSweepChart((rating) => {
    if (sweptFactor) onPick(sweptFactor, rating);
  });

  runButton.addEventListener("click", () => {
    const factorId = factorPick.value;
    postWhatif({
      ratings: { ...store.ratings },
      size: store.size,
      sweep: {
        factor_id: factorId,
        from: Number(fromInput.value),
        to: Number(toInput.value),
        steps: 25,
      },
    }).then(
      (resp) => {
        sweptFactor = resp.factor_id;
        const current = store.ratings[factorId];
        const factor = schema.factors.find((f) => f.id === factorId);
        const numeric =
          typeof current === "number"
            ? current
            : (factor?.level_labels.indexOf(current ?? "") ?? -1);
        chart.render(resp, numeric);
      },
      (err: unknown) => {
        chart.showError(err instanceof Error ? err.message : String(err));
      },
    );
  });

  const controls = document.createElement("div");
  controls.className = "sweep-controls";
  controls.append(
    factorPick,
    document.createTextNode(" from "),
    fromInput,
    document.createTextNode(" to "),
    toInput,
    runButton,
  );
  root.append(heading, controls, chart.root);
  return { root };
}
