import { Route } from "../state.js";

/** Handed to every view: the pinned snapshot and the navigation hook
 * (views never mutate location themselves). */
export interface ViewContext {
  snapshot?: string;
  navigate(route: Route): void;
}

export function queryForm(
  fields: { name: string; label: string; value: string; error?: string }[],
  onSubmit: (values: Record<string, string>) => void,
  submitLabel = "look up",
): HTMLFormElement {
  const form = document.createElement("form");
  form.className = "query";
  const inputs: Record<string, HTMLInputElement> = {};
  for (const field of fields) {
    const input = document.createElement("input");
    input.name = field.name;
    input.placeholder = field.label;
    input.value = field.value;
    input.setAttribute("aria-label", field.label);
    if (field.error) input.classList.add("invalid");
    inputs[field.name] = input;
    form.append(input);
  }
  const button = document.createElement("button");
  button.type = "submit";
  button.textContent = submitLabel;
  form.append(button);
  for (const field of fields) {
    if (field.error) {
      const message = document.createElement("div");
      message.className = "field-error";
      message.setAttribute("data-field-error", field.name);
      message.textContent = field.error;
      form.append(message);
    }
  }
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    onSubmit(Object.fromEntries(Object.entries(inputs).map(([k, v]) => [k, v.value.trim()])));
  });
  return form;
}
