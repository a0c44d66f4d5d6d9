// End-to-end smoke against a live service: boots the Python server, walks a
// phone session into the Basic conflict, renders the board from live data,
// then drives it through diagnosis apply. A fetch wrapper records every
// mutating request so the no-blind-writes invariant is checked globally.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { render } from "../src/board.js";
import { SessionStore } from "../src/state.js";
import type { Snapshot } from "../src/types.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

const PHONE_TEXT = `model phone
root Phone
mandatory Phone Screen
optional Phone GPS
alt Screen Basic HD
constraint (not (and Basic GPS))
`;

let server: ChildProcess;
const mutationBodies: Record<string, unknown>[] = [];

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "fmgc-e2e-"));
  server = spawn(
    "python3",
    ["-m", "fmgc.cli", "serve", "--port", String(PORT), "--data-dir", dataDir],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const deadline = Date.now() + 30000;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/api/models/none`);
      if (response.status === 404) break; // service is answering
    } catch {
      if (Date.now() > deadline) throw new Error("service did not start");
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }

  // record the body of every mutating request the board sends
  const realFetch = globalThis.fetch;
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    if (method !== "GET" && init?.body) {
      mutationBodies.push(JSON.parse(init.body as string));
    }
    return realFetch(input, init);
  }) as typeof fetch;
});

afterAll(() => {
  server?.kill();
});

async function raw<T>(path: string, method: string, body?: unknown): Promise<T> {
  const response = await fetch(`${BASE}${path}`, {
    method,
    headers: body ? { "content-type": "application/json" } : undefined,
    body: body ? JSON.stringify(body) : undefined,
  });
  if (!response.ok) throw new Error(`${method} ${path} -> ${response.status}: ${await response.text()}`);
  return (await response.json()) as T;
}

describe("session board against the live service", () => {
  it("shows the Basic conflict, applies the top diagnosis, and never writes blindly", async () => {
    // -- stage a phone session with disagreeing members -----------------------
    const model = await raw<{ id: string }>("/api/models", "POST", { text: PHONE_TEXT });
    let snapshot = await raw<Snapshot>("/api/sessions", "POST", {
      model_id: model.id,
      members: ["u1", "u2"],
      matrix_ids: {},
    });
    const sid = snapshot.id;
    const put = (member: string, feature: string, value: string, version: number) =>
      raw<Snapshot>(`/api/sessions/${sid}/members/${member}/preferences/${feature}`, "PUT", {
        value,
        version,
      });
    snapshot = await put("u1", "Basic", "include", snapshot.version);
    snapshot = await put("u2", "Basic", "exclude", snapshot.version);
    for (let i = 0; i < 3; i++) {
      snapshot = await raw<Snapshot>(`/api/sessions/${sid}/step`, "POST", {
        version: snapshot.version,
      });
    }
    expect(snapshot.phase).toBe("negotiation");

    // -- board renders the conflict with the live pattern text ----------------
    document.body.innerHTML = "<div id='board'></div>";
    const container = document.getElementById("board")!;
    const store = new SessionStore(new ApiClient(BASE), sid);
    const redraw = () =>
      render(container, store.state, (action) => void store.submit(action), (member) =>
        store.setActiveMember(member),
      );
    store.subscribe(redraw);
    await store.refresh();

    const card = container.querySelector(".conflict-card[data-feature='Basic']")!;
    expect(card).not.toBeNull();
    expect(card.textContent).toContain("u1: include (stated)");
    expect(card.textContent).toContain("u2: exclude (stated)");
    const patternTexts = [...card.querySelectorAll(".patterns li")].map((li) => li.textContent!);
    expect(
      patternTexts.some((t) =>
        t.includes("the feature HD could be an alternative"),
      ),
    ).toBe(true);
    expect(patternTexts.some((t) => t.includes("could be an alternative"))).toBe(true);

    // -- resolve the conflict via a win-win proposal from the board ------------
    store.setActiveMember("u1");
    await store.submit({ kind: "propose", feature: "Basic", value: "include", rationale: "" });
    const proposalId = store.state.snapshot!.proposals[0].id;
    await store.submit({ kind: "accept", proposalId });
    store.setActiveMember("u2");
    await store.submit({ kind: "accept", proposalId });
    expect(store.state.snapshot!.conflicts[0].status).toBe("resolved");
    redraw();
    expect(
      container
        .querySelector(".conflict-card[data-feature='Basic']")!
        .getAttribute("data-status"),
    ).toBe("resolved");

    // -- drive into an inconsistency: everyone also wants GPS ------------------
    store.setActiveMember("u1");
    await store.submit({ kind: "set_pref", feature: "GPS", value: "include" });
    store.setActiveMember("u2");
    await store.submit({ kind: "set_pref", feature: "GPS", value: "include" });
    await store.submit({ kind: "step" }); // aggregation routes to diagnosis
    expect(store.state.snapshot!.phase).toBe("diagnosis");
    redraw();

    const rows = [...container.querySelectorAll(".diagnosis-row")];
    expect(rows.length).toBeGreaterThan(0);
    expect(container.querySelector(".diagnoses .empty")).toBeNull();

    // -- applying the top diagnosis empties the diagnosis panel ----------------
    await store.submit({ kind: "apply_diagnosis", index: 0 });
    expect(store.state.snapshot!.phase).toBe("aggregation");
    redraw();
    expect([...container.querySelectorAll(".diagnosis-row")]).toHaveLength(0);
    expect(container.querySelector(".diagnoses .empty")).not.toBeNull();

    // -- every mutation the board sent carried a version ------------------------
    const boardMutations = mutationBodies.filter(
      (body) => !("model_id" in body) && !("text" in body),
    );
    expect(boardMutations.length).toBeGreaterThanOrEqual(8);
    for (const body of boardMutations) {
      expect(body).toHaveProperty("version");
      expect(typeof (body as { version: unknown }).version).toBe("number");
    }
  });

  it("stale writes get a 409 and the store refetches", async () => {
    const model = await raw<{ id: string }>("/api/models", "POST", { text: PHONE_TEXT });
    const created = await raw<Snapshot>("/api/sessions", "POST", {
      model_id: model.id,
      members: ["u1"],
      matrix_ids: {},
    });
    const store = new SessionStore(new ApiClient(BASE), created.id);
    await store.refresh();
    // another client moves the session forward
    await raw(`/api/sessions/${created.id}/members/u1/preferences/GPS`, "PUT", {
      value: "include",
      version: created.version,
    });
    await store.submit({ kind: "step" }); // uses the stale version
    expect(store.state.notice).toContain("version_conflict");
    expect(store.state.snapshot!.version).toBe(created.version + 1);
  });
});
