// Entry point for the static page: pick an ontology/strategy pair from the
// service catalog and open a session.

import { ApiClient } from "./api.js";
import { createChatApp } from "./app.js";

const BASE_URL =
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const api = new ApiClient(BASE_URL);
  const app = createChatApp(root, api);

  const picker = document.getElementById("picker") as HTMLFormElement | null;
  if (!picker) {
    await app.start("proficiency", "ordinal-max");
    return;
  }
  const ontologySelect = picker.elements.namedItem(
    "ontology"
  ) as HTMLSelectElement;
  const strategySelect = picker.elements.namedItem(
    "strategy"
  ) as HTMLSelectElement;
  try {
    const catalog = await api.catalog();
    ontologySelect.innerHTML = "";
    for (const name of Object.keys(catalog.ontologies)) {
      ontologySelect.add(new Option(name, name));
    }
    strategySelect.innerHTML = "";
    for (const name of catalog.strategies) {
      strategySelect.add(new Option(name, name));
    }
  } catch {
    // keep whatever the page shipped; start() shows the error banner
  }
  picker.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.start(ontologySelect.value, strategySelect.value);
  });
}

void boot();
