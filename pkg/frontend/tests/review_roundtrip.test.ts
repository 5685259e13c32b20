// @vitest-environment happy-dom
//
// Review round-trip through the real DOM: reject one of three candidates via
// the rendered buttons, advance, and check the correspondence view; then
// simulate a page refresh mid-review and verify convergence to server state.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { ReviewStore } from "../src/state.js";
import { bindKeyboard, render } from "../src/view.js";
import { FakeService, threeCandidateRun } from "./fake_service.js";

function mount(service: FakeService): { store: ReviewStore; root: HTMLElement } {
  vi.stubGlobal("fetch", service.fetch);
  const root = document.createElement("div");
  document.body.append(root);
  const store = new ReviewStore(new ApiClient("http://svc"), "demo");
  store.subscribe(() => render(store, root));
  return { store, root };
}

function rowByPair(root: HTMLElement, pair: string): HTMLElement {
  const rows = [...root.querySelectorAll(".candidate")] as HTMLElement[];
  const row = rows.find((r) => r.querySelector(".pair")?.textContent === pair);
  if (!row) throw new Error(`no candidate row for ${pair}`);
  return row;
}

beforeEach(() => {
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
});

describe("review round-trip", () => {
  it("rejecting one of three and advancing excludes that pair from the view", async () => {
    const service = new FakeService(threeCandidateRun());
    const { store, root } = mount(service);
    await store.refresh();

    expect(root.querySelectorAll(".candidate")).toHaveLength(3);

    const rejectButton = rowByPair(root, "river → fluss")
      .querySelector("button.reject") as HTMLButtonElement;
    rejectButton.click();
    await vi.waitFor(() => {
      expect(rowByPair(root, "river → fluss").className).toContain("status-rejected");
    });

    const advanceButton = root.querySelector("button.advance") as HTMLButtonElement;
    advanceButton.click();
    await vi.waitFor(() => {
      expect(root.querySelector(".correspondences")).not.toBeNull();
    });

    const shown = [...root.querySelectorAll(".table-pair")].map((el) => el.textContent);
    expect(shown).toContain("country → land");
    expect(shown).toContain("city → stadt");
    expect(shown).not.toContain("river → fluss");
    const entries = [...root.querySelectorAll(".correspondence")].map((el) => el.textContent);
    expect(entries.some((e) => e?.includes("muendung"))).toBe(false);
  });

  it("double-clicking a decision sends exactly one request", async () => {
    const service = new FakeService(threeCandidateRun());
    const { store, root } = mount(service);
    await store.refresh();

    const button = rowByPair(root, "country → land")
      .querySelector("button.reject") as HTMLButtonElement;
    button.click();
    button.click();
    await vi.waitFor(() => expect(store.pending.size).toBe(0));

    const decisions = service.requests.filter((r) => r.includes("/decision"));
    expect(decisions).toHaveLength(1);
    expect(service.run.candidates[0].status).toBe("rejected");
  });

  it("page refresh mid-review converges to server state", async () => {
    const service = new FakeService(threeCandidateRun());
    const first = mount(service);
    await first.store.refresh();
    const confirmButton = rowByPair(first.root, "country → land")
      .querySelector("button.confirm") as HTMLButtonElement;
    confirmButton.click();
    await vi.waitFor(() => expect(first.store.pending.size).toBe(0));

    // a different client decides another candidate meanwhile
    service.run.candidates[1].status = "rejected";

    // "refresh": fresh DOM, fresh store, no local state carried over
    document.body.innerHTML = "";
    const second = mount(service);
    await second.store.refresh();

    expect(rowByPair(second.root, "country → land").className).toContain("status-confirmed");
    expect(rowByPair(second.root, "city → stadt").className).toContain("status-rejected");
    expect(rowByPair(second.root, "river → fluss").className).toContain("status-proposed");
    expect(second.store.pending.size).toBe(0);
  });

  it("empty candidate sets get an explicit empty state", async () => {
    const run = threeCandidateRun();
    run.candidates = [];
    const service = new FakeService(run);
    const { store, root } = mount(service);
    await store.refresh();
    expect(root.querySelector(".empty-state")?.textContent).toContain("No table candidates");
  });

  it("rejecting everything yields the explanatory empty correspondence view", async () => {
    const service = new FakeService(threeCandidateRun());
    const { store, root } = mount(service);
    await store.refresh();
    for (const candidate of [...service.run.candidates]) {
      const row = root.querySelector(`[data-candidate-id="${candidate.id}"]`) as HTMLElement;
      (row.querySelector("button.reject") as HTMLButtonElement).click();
      await vi.waitFor(() => expect(store.pending.size).toBe(0));
    }
    await store.advanceAndShow();
    const empty = root.querySelector(".correspondences .empty-state");
    expect(empty?.textContent).toContain("No correspondences");
  });

  it("keyboard triage confirms the selected candidate", async () => {
    const service = new FakeService(threeCandidateRun());
    const { store, root } = mount(service);
    bindKeyboard(store, document);
    await store.refresh();

    document.dispatchEvent(new KeyboardEvent("keydown", { key: "j" }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "c" }));
    await vi.waitFor(() => expect(service.run.candidates[1].status).toBe("confirmed"));
    expect(rowByPair(root, "city → stadt").className).toContain("status-confirmed");
  });

  it("buttons for decided candidates are disabled", async () => {
    const run = threeCandidateRun();
    run.candidates[0].status = "confirmed";
    const service = new FakeService(run);
    const { store, root } = mount(service);
    await store.refresh();
    const row = rowByPair(root, "country → land");
    expect((row.querySelector("button.confirm") as HTMLButtonElement).disabled).toBe(true);
    expect((row.querySelector("button.reject") as HTMLButtonElement).disabled).toBe(true);
  });
});
