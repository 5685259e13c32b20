import { ApiClient } from "./api.js";
import { ReviewStore } from "./state.js";
import { bindKeyboard, render } from "./view.js";

const params = new URLSearchParams(window.location.search);
const runId = params.get("run");
const baseUrl = params.get("service") ?? "http://127.0.0.1:8000";

const root = document.getElementById("app") as HTMLElement;

if (!runId) {
  root.textContent = "Pass the run to review as ?run=<run-id> (and optionally ?service=<url>).";
} else {
  const store = new ReviewStore(new ApiClient(baseUrl), runId);
  store.subscribe(() => render(store, root));
  bindKeyboard(store, document);
  store.refresh().catch((error) => {
    root.textContent = `Cannot load run ${runId}: ${String(error)}. Retry with a reload.`;
  });
}
