/** Page wiring: model picker and upload, graph pane with level toggle
 * and node inspector, counts line comparing what is rendered against
 * what the service reports, and the streaming chat pane.
 *
 * Everything talks to the service exclusively through ApiClient — the
 * UI has no other channel into the backend.
 */

import { ApiClient, ApiError } from "./api.js";
import { ChatController } from "./chat.js";
import { GraphView } from "./graphView.js";
import { renderInspector } from "./inspector.js";
import type {
  GraphLevel,
  ModelRecord,
  ProviderSpecPayload,
} from "./types.js";
import { GRAPH_LEVELS } from "./types.js";

export interface AppOptions {
  baseUrl?: string;
  token?: string;
  fetchImpl?: typeof fetch;
}

export interface App {
  api: ApiClient;
  graphView: GraphView;
  refreshModels: () => Promise<void>;
  setLevel: (level: GraphLevel) => Promise<void>;
  currentLevel: () => GraphLevel;
  currentModel: () => ModelRecord | null;
}

const LEVEL_TITLES: Record<GraphLevel, string> = {
  complete: "Complete",
  high: "Condensed",
};

export function initApp(root: HTMLElement, options: AppOptions = {}): App {
  const api = new ApiClient(options);
  root.classList.add("app");
  root.innerHTML = `
    <header class="topbar">
      <h1 class="brand">pidgraph</h1>
      <select class="model-select" aria-label="Model"></select>
      <label class="upload-label">
        Upload XML
        <input type="file" class="upload-input" accept=".xml,application/xml" hidden>
      </label>
      <div class="level-toggle" role="group" aria-label="Graph level"></div>
      <span class="counts" aria-live="polite"></span>
      <span class="status" aria-live="polite"></span>
    </header>
    <main class="panes">
      <section class="graph-pane">
        <div class="graph-mount"></div>
        <aside class="inspector-mount"></aside>
      </section>
      <section class="chat-pane">
        <details class="provider-settings">
          <summary>Answer provider</summary>
          <div class="provider-fields">
            <select class="provider-name" aria-label="Provider">
              <option value="local">local</option>
              <option value="openai">openai</option>
              <option value="anthropic">anthropic</option>
              <option value="scripted">scripted</option>
            </select>
            <input class="provider-endpoint" placeholder="endpoint URL (or script path for scripted)">
            <input class="provider-model" placeholder="model id (optional)">
            <input class="provider-credential" placeholder="credential env var (optional)">
          </div>
        </details>
        <div class="chat-mount"></div>
        <form class="chat-form">
          <input class="chat-input" placeholder="Ask about the plant…" aria-label="Question">
          <button type="submit" class="chat-send">Send</button>
        </form>
      </section>
    </main>
  `;

  const modelSelect = root.querySelector(".model-select") as HTMLSelectElement;
  const uploadInput = root.querySelector(".upload-input") as HTMLInputElement;
  const levelToggle = root.querySelector(".level-toggle") as HTMLElement;
  const countsEl = root.querySelector(".counts") as HTMLElement;
  const statusEl = root.querySelector(".status") as HTMLElement;
  const graphMount = root.querySelector(".graph-mount") as HTMLElement;
  const inspectorMount = root.querySelector(".inspector-mount") as HTMLElement;
  const chatMount = root.querySelector(".chat-mount") as HTMLElement;
  const chatForm = root.querySelector(".chat-form") as HTMLFormElement;
  const chatInput = root.querySelector(".chat-input") as HTMLInputElement;
  const chatSend = root.querySelector(".chat-send") as HTMLButtonElement;
  const providerName = root.querySelector(".provider-name") as HTMLSelectElement;
  const providerEndpoint = root.querySelector(".provider-endpoint") as HTMLInputElement;
  const providerModel = root.querySelector(".provider-model") as HTMLInputElement;
  const providerCredential = root.querySelector(".provider-credential") as HTMLInputElement;

  let models: ModelRecord[] = [];
  let model: ModelRecord | null = null;
  let level: GraphLevel = "high";
  let chat: ChatController | null = null;
  let chatSessionKey = "";

  const graphView = new GraphView(graphMount, {
    onSelect: (node) => renderInspector(inspectorMount, node),
  });
  renderInspector(inspectorMount, null);

  const setStatus = (text: string, isError = false): void => {
    statusEl.textContent = text;
    statusEl.classList.toggle("error", isError);
  };

  const describeError = (error: unknown): string =>
    error instanceof ApiError ? `${error.message} (HTTP ${error.status})` : String(error);

  // -- level toggle ---------------------------------------------------

  for (const option of GRAPH_LEVELS) {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "level-btn";
    button.dataset.level = option;
    button.textContent = LEVEL_TITLES[option];
    button.addEventListener("click", () => {
      void setLevel(option);
    });
    levelToggle.appendChild(button);
  }

  const markLevel = (): void => {
    for (const el of Array.from(levelToggle.querySelectorAll(".level-btn"))) {
      el.classList.toggle("active", (el as HTMLElement).dataset.level === level);
    }
  };

  // -- graph loading ----------------------------------------------------

  const showGraph = async (): Promise<void> => {
    if (!model) {
      countsEl.textContent = "";
      return;
    }
    const payload = await api.getGraph(model.modelId, level);
    const rendered = graphView.setGraph(payload);
    renderInspector(inspectorMount, null);
    const reportedNodes = model.nodes[level];
    const reportedEdges = model.edges[level];
    const agreement =
      rendered.nodes === reportedNodes && rendered.edges === reportedEdges ? "=" : "≠";
    countsEl.textContent =
      `rendered ${rendered.nodes} nodes / ${rendered.edges} edges ` +
      `${agreement} service ${reportedNodes} / ${reportedEdges}`;
  };

  const setLevel = async (next: GraphLevel): Promise<void> => {
    level = next;
    markLevel();
    try {
      await showGraph();
      setStatus("");
    } catch (error) {
      setStatus(`graph load failed: ${describeError(error)}`, true);
    }
  };

  // -- models -----------------------------------------------------------

  const renderModelOptions = (): void => {
    modelSelect.textContent = "";
    for (const record of models) {
      const option = document.createElement("option");
      option.value = record.modelId;
      option.textContent = `${record.name} (${record.modelId.slice(0, 8)})`;
      modelSelect.appendChild(option);
    }
    if (model) modelSelect.value = model.modelId;
  };

  const selectModel = async (modelId: string): Promise<void> => {
    model = models.find((m) => m.modelId === modelId) ?? null;
    renderModelOptions();
    await showGraph();
  };

  const refreshModels = async (): Promise<void> => {
    try {
      models = await api.listModels();
      if (!model || !models.some((m) => m.modelId === model?.modelId)) {
        model = models[0] ?? null;
      }
      renderModelOptions();
      await showGraph();
      setStatus(models.length ? "" : "no models yet — upload a P&ID XML file");
    } catch (error) {
      setStatus(`model list failed: ${describeError(error)}`, true);
    }
  };

  modelSelect.addEventListener("change", () => {
    void selectModel(modelSelect.value).catch((error) =>
      setStatus(`graph load failed: ${describeError(error)}`, true),
    );
  });

  uploadInput.addEventListener("change", async () => {
    const file = uploadInput.files?.[0];
    if (!file) return;
    setStatus(`uploading ${file.name}…`);
    try {
      const { model: record } = await api.uploadModel(file.name, file);
      models = await api.listModels();
      model = models.find((m) => m.modelId === record.modelId) ?? record;
      renderModelOptions();
      await showGraph();
      setStatus(`ingested ${record.name}`);
    } catch (error) {
      setStatus(`upload failed: ${describeError(error)}`, true);
    } finally {
      uploadInput.value = "";
    }
  });

  // -- chat ---------------------------------------------------------------

  const providerSpec = (): ProviderSpecPayload => {
    const spec: ProviderSpecPayload = { providerName: providerName.value };
    if (providerEndpoint.value.trim()) spec.endpoint = providerEndpoint.value.trim();
    if (providerModel.value.trim()) spec.modelId = providerModel.value.trim();
    if (providerCredential.value.trim()) spec.credentialEnv = providerCredential.value.trim();
    return spec;
  };

  const ensureChat = async (): Promise<ChatController> => {
    if (!model) throw new Error("no model selected");
    const key = `${model.modelId}:${level}:${JSON.stringify(providerSpec())}`;
    if (chat && chatSessionKey === key) return chat;
    const session = await api.createSession(model.modelId, level, providerSpec());
    chatMount.textContent = "";
    chat = new ChatController({
      api,
      sessionId: session.sessionId,
      container: chatMount,
      onBusyChange: (busy) => {
        chatSend.disabled = busy;
        chatInput.disabled = busy;
      },
    });
    chatSessionKey = key;
    return chat;
  };

  chatForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const question = chatInput.value;
    if (!question.trim()) return;
    chatInput.value = "";
    void (async () => {
      try {
        const controller = await ensureChat();
        setStatus("");
        await controller.ask(question);
      } catch (error) {
        setStatus(`chat failed: ${describeError(error)}`, true);
      }
    })();
  });

  markLevel();
  void refreshModels();

  return {
    api,
    graphView,
    refreshModels,
    setLevel,
    currentLevel: () => level,
    currentModel: () => model,
  };
}
