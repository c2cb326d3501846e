/** End-to-end: the UI against a real running service over real sockets.
 *
 * A pidgraph server is spawned on a free port with a fresh store; the
 * reference P&ID is uploaded through the client; the graph view and
 * chat are driven exactly as the browser drives them. Answers come
 * from the scripted provider so the run needs no external LLM.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { readFile } from "node:fs/promises";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { initApp } from "../src/app.js";
import { ChatController, type ChatFrameSnapshot } from "../src/chat.js";
import { GraphView } from "../src/graphView.js";
import type { GraphLevel, ModelRecord } from "../src/types.js";
import { installDom } from "./domSetup.js";

installDom();

const FIXTURE_XML = fileURLToPath(
  new URL("../../fixtures/reference_sample.xml", import.meta.url),
);

const ANSWER_TEXT =
  "The buffer tank T4750 feeds pump P4711 through the level valve LV4750 and suction valve V104.02.";

const freePort = (): Promise<number> =>
  new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });

let server: ChildProcess;
let baseUrl: string;
let scriptPath: string;
let api: ApiClient;
let model: ModelRecord;

beforeAll(async () => {
  const workDir = mkdtempSync(join(tmpdir(), "pidgraph-ui-e2e-"));
  scriptPath = join(workDir, "answers.json");
  writeFileSync(
    scriptPath,
    JSON.stringify({
      responses: [
        { match: "feeds", text: ANSWER_TEXT, chunk_size: 16 },
        { text: "No scripted answer for that question.", chunk_size: 16 },
      ],
    }),
  );

  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  server = spawn(
    "pidgraph",
    ["serve", "--addr", `127.0.0.1:${port}`, "--store", join(workDir, "store")],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let serverLog = "";
  server.stdout?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  server.stderr?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));

  // Wait for the service to accept requests.
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const response = await fetch(`${baseUrl}/api/models`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error(`service did not come up; log so far:\n${serverLog}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }

  api = new ApiClient({ baseUrl });
  const xml = await readFile(FIXTURE_XML, "utf-8");
  const uploaded = await api.uploadModel("reference_sample.xml", xml);
  model = uploaded.model;
});

afterAll(() => {
  server?.kill("SIGKILL");
});

describe("graph rendering against the live service", () => {
  it("renders exactly the counts the service reports, at both levels", async () => {
    for (const level of ["high", "complete"] as GraphLevel[]) {
      const payload = await api.getGraph(model.modelId, level);
      const container = document.createElement("div");
      document.body.appendChild(container);
      const view = new GraphView(container);
      const rendered = view.setGraph(payload);

      expect(rendered.nodes).toBe(model.nodes[level]);
      expect(rendered.edges).toBe(model.edges[level]);
      // And the DOM agrees with what setGraph returned.
      expect(container.querySelectorAll(".gv-node").length).toBe(model.nodes[level]);
      expect(container.querySelectorAll(".gv-edge").length).toBe(model.edges[level]);
      console.log(
        `[ui-e2e] level=${level}: rendered ${rendered.nodes}/${rendered.edges} ` +
          `= service ${model.nodes[level]}/${model.edges[level]}`,
      );
    }
  });

  it("level toggle on live data re-renders in under a second", async () => {
    const high = await api.getGraph(model.modelId, "high");
    const complete = await api.getGraph(model.modelId, "complete");
    const container = document.createElement("div");
    document.body.appendChild(container);
    const view = new GraphView(container);
    view.setGraph(high);

    const started = performance.now();
    const counts = view.setGraph(complete);
    const elapsed = performance.now() - started;
    console.log(`[ui-e2e] live toggle high→complete: ${elapsed.toFixed(1)} ms`);
    expect(counts.nodes).toBe(model.nodes.complete);
    expect(elapsed).toBeLessThan(1000);
  });

  it("the app shell shows matching rendered/service counts and toggles levels", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = initApp(root, { baseUrl });
    await app.refreshModels();

    const countsEl = root.querySelector(".counts") as HTMLElement;
    expect(app.currentModel()?.modelId).toBe(model.modelId);
    expect(countsEl.textContent).toContain(" = service ");
    expect(countsEl.textContent).toContain(`${model.nodes.high} nodes`);

    await app.setLevel("complete");
    expect(countsEl.textContent).toContain(`${model.nodes.complete} nodes`);
    expect(countsEl.textContent).toContain(" = service ");
    expect(root.querySelectorAll(".gv-node").length).toBe(model.nodes.complete);
  });
});

describe("chat streaming against the live service", () => {
  it("renders the first token before the stream completes", async () => {
    const session = await api.createSession(model.modelId, "high", {
      providerName: "scripted",
      endpoint: scriptPath,
    });

    const container = document.createElement("div");
    document.body.appendChild(container);
    const snapshots: ChatFrameSnapshot[] = [];
    const chat = new ChatController({
      api,
      sessionId: session.sessionId,
      container,
      onFrameRendered: (snapshot) => snapshots.push(snapshot),
    });

    await chat.ask("What feeds the pump?");

    const kinds = snapshots.map((s) => s.frame.type);
    // Progressive delivery: several token frames, then exactly one done.
    expect(kinds.filter((k) => k === "token").length).toBeGreaterThan(1);
    expect(kinds[kinds.length - 1]).toBe("done");
    expect(kinds.slice(0, -1).every((k) => k === "token")).toBe(true);

    // THE criterion: at the moment the first token frame had rendered,
    // the stream was not complete (no done had been seen), yet the
    // token text was already in the transcript DOM.
    const first = snapshots[0];
    expect(first.frame.type).toBe("token");
    expect(first.transcriptText).toContain(ANSWER_TEXT.slice(0, 16));
    expect(first.transcriptText).not.toContain(ANSWER_TEXT);

    // By the end the full answer is on screen.
    const bubble = container.querySelector(".msg.assistant") as HTMLElement;
    expect(bubble.textContent).toBe(ANSWER_TEXT);
    console.log(
      `[ui-e2e] streamed ${kinds.length - 1} token frames before done; ` +
        `first frame showed ${JSON.stringify(ANSWER_TEXT.slice(0, 16))}`,
    );
  });

  it("persists the exchange in the session history", async () => {
    const session = await api.createSession(model.modelId, "high", {
      providerName: "scripted",
      endpoint: scriptPath,
    });
    const container = document.createElement("div");
    document.body.appendChild(container);
    const chat = new ChatController({ api, sessionId: session.sessionId, container });
    await chat.ask("What feeds the pump?");

    const detail = await api.getSession(session.sessionId);
    expect(detail.history.map((m) => m.role)).toEqual(["user", "assistant"]);
    expect(detail.history[1].content).toBe(ANSWER_TEXT);

    // Reloading that history renders the same transcript a fresh client would see.
    const rehydrated = document.createElement("div");
    document.body.appendChild(rehydrated);
    const fresh = new ChatController({ api, sessionId: session.sessionId, container: rehydrated });
    fresh.loadHistory(detail.history);
    expect(rehydrated.querySelectorAll(".msg")).toHaveLength(2);
    expect(rehydrated.querySelector(".msg.assistant")?.textContent).toBe(ANSWER_TEXT);
  });

  it("keeps the transcript usable after asking about an unscripted topic", async () => {
    const session = await api.createSession(model.modelId, "high", {
      providerName: "scripted",
      endpoint: scriptPath,
    });
    const container = document.createElement("div");
    document.body.appendChild(container);
    const chat = new ChatController({ api, sessionId: session.sessionId, container });

    await chat.ask("Completely unrelated question");
    const bubbles = container.querySelectorAll(".msg.assistant");
    expect(bubbles[bubbles.length - 1].textContent).toBe(
      "No scripted answer for that question.",
    );

    await chat.ask("And what feeds the pump?");
    const after = container.querySelectorAll(".msg.assistant");
    expect(after[after.length - 1].textContent).toBe(ANSWER_TEXT);
  });
});
