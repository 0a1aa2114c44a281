import { ApiError, putRules } from "./api.js";
import type { RuleJson, SchemaResponse } from "./types.js";

export interface RuleEditor {
  root: HTMLElement;
}

/** Deep-copy so edits never touch the last server-confirmed state. */
function cloneRules(rules: RuleJson[]): RuleJson[] {
  return rules.map((rule) => ({
    antecedents: rule.antecedents.map(
      ([factor, level]) => [factor, level] as [string, number],
    ),
    target: rule.target,
    delta: rule.delta,
    note: rule.note ?? "",
  }));
}

function factorSelect(schema: SchemaResponse, value: string): HTMLSelectElement {
  const select = document.createElement("select");
  for (const factor of schema.factors) {
    const option = document.createElement("option");
    option.value = factor.id;
    option.textContent = factor.id;
    select.append(option);
  }
  select.value = value;
  return select;
}

function levelSelect(
  schema: SchemaResponse,
  factorId: string,
  value: number,
): HTMLSelectElement {
  const select = document.createElement("select");
  const factor = schema.factors.find((f) => f.id === factorId);
  const labels = factor ? factor.level_labels : [];
  labels.forEach((label, index) => {
    const option = document.createElement("option");
    option.value = String(index);
    option.textContent = `${index} (${label})`;
    select.append(option);
  });
  select.value = String(value);
  return select;
}

export function renderRuleEditor(
  schema: SchemaResponse,
  initialRules: RuleJson[],
  onSaved: (rules: RuleJson[]) => void,
): RuleEditor {
  const root = document.createElement("div");
  root.className = "rule-editor";
  let working = cloneRules(initialRules);
  const rowErrors = new Map<number, string>();
  let globalError = "";

  const firstFactor = schema.factors[0]?.id ?? "";

  function render(): void {
    root.replaceChildren();
    const heading = document.createElement("h2");
    heading.textContent = "Dependency rules";
    root.append(heading);

    if (globalError) {
      const line = document.createElement("p");
      line.className = "rule-error";
      line.textContent = globalError;
      root.append(line);
    }

    const list = document.createElement("div");
    list.className = "rule-list";
    if (working.length === 0) {
      const empty = document.createElement("p");
      empty.className = "rule-empty";
      empty.textContent = "No rules defined.";
      list.append(empty);
    }
    working.forEach((rule, index) => list.append(ruleRow(rule, index)));
    root.append(list);

    const addButton = document.createElement("button");
    addButton.type = "button";
    addButton.dataset.role = "add-rule";
    addButton.textContent = "Add rule";
    addButton.addEventListener("click", () => {
      working.push({
        antecedents: [[firstFactor, 0]],
        target: firstFactor,
        delta: 0,
        note: "",
      });
      render();
    });

    const saveButton = document.createElement("button");
    saveButton.type = "button";
    saveButton.dataset.role = "save-rules";
    saveButton.textContent = "Save rules";
    saveButton.addEventListener("click", () => void save());

    const actions = document.createElement("div");
    actions.className = "rule-actions";
    actions.append(addButton, saveButton);
    root.append(actions);
  }

  function ruleRow(rule: RuleJson, index: number): HTMLElement {
    const row = document.createElement("div");
    row.className = "rule-row";
    row.dataset.ruleIndex = String(index);

    const when = document.createElement("span");
    when.textContent = "when ";
    row.append(when);
    rule.antecedents.forEach((antecedent, aIndex) => {
      const pair = document.createElement("span");
      pair.className = "antecedent";
      const factor = factorSelect(schema, antecedent[0]);
      const level = levelSelect(schema, antecedent[0], antecedent[1]);
      factor.addEventListener("change", () => {
        antecedent[0] = factor.value;
        antecedent[1] = 0;
        render();
      });
      level.addEventListener("change", () => {
        antecedent[1] = Number(level.value);
      });
      const drop = document.createElement("button");
      drop.type = "button";
      drop.textContent = "×";
      drop.title = "remove condition";
      drop.addEventListener("click", () => {
        rule.antecedents.splice(aIndex, 1);
        render();
      });
      pair.append(factor, document.createTextNode(" = "), level, drop);
      row.append(pair);
    });
    const addCondition = document.createElement("button");
    addCondition.type = "button";
    addCondition.textContent = "+ condition";
    addCondition.addEventListener("click", () => {
      rule.antecedents.push([firstFactor, 0]);
      render();
    });
    row.append(addCondition);

    const arrow = document.createElement("span");
    arrow.textContent = " then adjust ";
    const target = factorSelect(schema, rule.target);
    target.dataset.role = "target";
    target.addEventListener("change", () => {
      rule.target = target.value;
    });
    const delta = document.createElement("input");
    delta.type = "number";
    delta.step = "0.1";
    delta.value = String(rule.delta);
    delta.dataset.role = "delta";
    delta.addEventListener("input", () => {
      rule.delta = Number(delta.value);
    });
    const note = document.createElement("input");
    note.type = "text";
    note.placeholder = "note";
    note.value = rule.note ?? "";
    note.addEventListener("input", () => {
      rule.note = note.value;
    });
    const remove = document.createElement("button");
    remove.type = "button";
    remove.dataset.role = "remove-rule";
    remove.textContent = "Remove";
    remove.addEventListener("click", () => {
      working.splice(index, 1);
      rowErrors.delete(index);
      render();
    });
    row.append(arrow, target, document.createTextNode(" by "), delta, note, remove);

    const message = rowErrors.get(index);
    if (message) {
      const line = document.createElement("p");
      line.className = "rule-error";
      line.dataset.role = "rule-error";
      line.textContent = message;
      row.append(line);
    }
    return row;
  }

  async function save(): Promise<void> {
    rowErrors.clear();
    globalError = "";
    try {
      const response = await putRules(working);
      working = cloneRules(response.rules);
      render();
      onSaved(response.rules);
    } catch (err) {
      if (err instanceof ApiError) {
        // "$.rules[3].delta: ..." anchors the message to its row.
        const match = /^\$\.rules\[(\d+)\]/.exec(err.detail);
        if (match) {
          rowErrors.set(Number(match[1]), err.detail);
        } else {
          globalError = err.detail;
        }
      } else {
        globalError = err instanceof Error ? err.message : String(err);
      }
      render();
    }
  }

  render();
  return { root };
}
