import { getSchema, postProject } from "./api.js";
import { renderRatingForm } from "./form.js";
import { renderRuleEditor } from "./rules.js";
import { EstimateStore } from "./store.js";
import { createSweepPanel } from "./sweep.js";
import type { SchemaResponse } from "./types.js";

export interface AppHandles {
  store: EstimateStore;
}

export function buildApp(root: HTMLElement, schema: SchemaResponse): AppHandles {
  root.replaceChildren();

  const header = document.createElement("header");
  header.innerHTML = `<h1>nfa estimation console</h1>
    <p class="binding">model: ${schema.model_binding}</p>`;

  const tabBar = document.createElement("nav");
  tabBar.className = "tabs";
  const estimateTab = document.createElement("button");
  estimateTab.type = "button";
  estimateTab.textContent = "Estimate";
  estimateTab.dataset.role = "tab-estimate";
  const rulesTab = document.createElement("button");
  rulesTab.type = "button";
  rulesTab.textContent = "Rules";
  rulesTab.dataset.role = "tab-rules";
  tabBar.append(estimateTab, rulesTab);

  const estimatePane = document.createElement("section");
  estimatePane.className = "pane";
  const rulesPane = document.createElement("section");
  rulesPane.className = "pane";
  rulesPane.hidden = true;

  function activate(pane: "estimate" | "rules"): void {
    estimatePane.hidden = pane !== "estimate";
    rulesPane.hidden = pane !== "rules";
    estimateTab.classList.toggle("active", pane === "estimate");
    rulesTab.classList.toggle("active", pane === "rules");
  }
  estimateTab.addEventListener("click", () => activate("estimate"));
  rulesTab.addEventListener("click", () => activate("rules"));
  activate("estimate");

  const store = new EstimateStore(schema, {
    onResult: (result) => form.showResult(result),
    onError: (message) => form.showError(message),
  });
  const form = renderRatingForm(schema, store);
  const sweep = createSweepPanel(schema, store, (factorId, rating) => {
    form.setControls(factorId, rating);
    store.setRating(factorId, rating);
  });

  const editor = renderRuleEditor(schema, schema.rules, (rules) => {
    schema.rules = rules;
    store.refreshNow();
  });

  estimatePane.append(form.root, sweep.root, saveScenarioStrip(schema, store));
  rulesPane.append(editor.root);
  root.append(header, tabBar, estimatePane, rulesPane);

  store.refreshNow();
  return { store };
}

function saveScenarioStrip(
  schema: SchemaResponse,
  store: EstimateStore,
): HTMLElement {
  const strip = document.createElement("div");
  strip.className = "save-strip";
  const idInput = document.createElement("input");
  idInput.type = "text";
  idInput.placeholder = "project id";
  const effortInput = document.createElement("input");
  effortInput.type = "number";
  effortInput.step = "any";
  effortInput.placeholder = "actual effort (pm)";
  const button = document.createElement("button");
  button.type = "button";
  button.dataset.role = "save-project";
  button.textContent = "Save as project";
  const status = document.createElement("span");
  status.className = "save-status";

  button.addEventListener("click", () => {
    postProject({
      id: idInput.value,
      size: store.size,
      model_id: schema.model_binding,
      ratings: { ...store.ratings },
      actual_effort: Number(effortInput.value),
    }).then(
      (resp) => {
        status.textContent = `saved (${resp.n} projects on file)`;
      },
      (err: unknown) => {
        status.textContent = err instanceof Error ? err.message : String(err);
      },
    );
  });

  strip.append(idInput, effortInput, button, status);
  return strip;
}

export async function boot(root: HTMLElement): Promise<void> {
  let schema: SchemaResponse;
  try {
    schema = await getSchema();
  } catch {
    root.replaceChildren();
    const banner = document.createElement("div");
    banner.className = "retry-banner";
    banner.textContent = "Could not load the factor schema. ";
    const retry = document.createElement("button");
    retry.type = "button";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void boot(root));
    banner.append(retry);
    root.append(banner);
    return;
  }
  buildApp(root, schema);
}

const mount = typeof document !== "undefined" && document.getElementById("app");
if (mount) void boot(mount);
