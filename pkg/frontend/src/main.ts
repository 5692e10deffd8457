// Browser entry point: wires the session state machine to the DOM.

import { ApiClient, EmbeddingInfo } from "./api.js";
import { SessionFlow } from "./session.js";
import { sparklineSvg, trajectorySvg } from "./charts.js";
import { estimateText, imageUrl, progressText, sideCoords, sideLabel } from "./ui.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8000";

const api = new ApiClient(baseUrl);
const flow = new SessionFlow(api);

const embeddingSelect = el<HTMLSelectElement>("embedding");
const strategySelect = el<HTMLSelectElement>("strategy");
const seedInput = el<HTMLInputElement>("seed");
const startButton = el<HTMLButtonElement>("start");
const setupPanel = el<HTMLElement>("setup");
const sessionPanel = el<HTMLElement>("session");
const choiceButtons = [el<HTMLButtonElement>("choice-0"), el<HTMLButtonElement>("choice-1")];
const progressNode = el<HTMLElement>("progress");
const estimateNode = el<HTMLElement>("estimate");
const trajectoryNode = el<HTMLElement>("trajectory");
const sparklineNode = el<HTMLElement>("sparkline");
const errorBanner = el<HTMLElement>("error");
const errorText = el<HTMLElement>("error-text");
const retryButton = el<HTMLButtonElement>("retry");

function renderChoice(button: HTMLButtonElement, side: 0 | 1): void {
  const pair = flow.view.pair;
  button.replaceChildren();
  if (pair === null) {
    button.disabled = true;
    button.textContent = "…";
    return;
  }
  button.disabled = flow.view.busy;
  const url = imageUrl(pair, side);
  if (url !== null) {
    const img = document.createElement("img");
    img.src = url;
    img.alt = sideLabel(pair, side);
    button.appendChild(img);
  }
  const name = document.createElement("span");
  name.className = "choice-name";
  name.textContent = sideLabel(pair, side);
  const coords = document.createElement("span");
  coords.className = "choice-coords";
  coords.textContent = sideCoords(pair, side);
  button.append(name, coords);
}

function render(): void {
  const view = flow.view;
  setupPanel.hidden = view.phase !== "idle";
  sessionPanel.hidden = view.phase === "idle";
  startButton.disabled = view.busy;
  renderChoice(choiceButtons[0]!, 0);
  renderChoice(choiceButtons[1]!, 1);
  progressNode.textContent = progressText(view.answered);
  estimateNode.textContent = estimateText(view.estimate);
  trajectoryNode.innerHTML = trajectorySvg(view.estimates, view.dim);
  sparklineNode.innerHTML = sparklineSvg(view.traces);
  errorBanner.hidden = view.error === null;
  errorText.textContent = view.error ?? "";
}

startButton.addEventListener("click", async () => {
  const embedding = embeddingSelect.value;
  if (embedding === "") return;
  const seed = Number.parseInt(seedInput.value, 10);
  await flow.start(embedding, {
    strategy: strategySelect.value,
    seed: Number.isNaN(seed) ? 0 : seed,
  });
  render();
});

for (const side of [0, 1] as const) {
  choiceButtons[side]!.addEventListener("click", async () => {
    render(); // disable both buttons before the request settles
    await flow.answer(side);
    render();
  });
}

retryButton.addEventListener("click", async () => {
  await flow.retry();
  render();
});

async function init(): Promise<void> {
  let embeddings: EmbeddingInfo[];
  try {
    embeddings = await api.listEmbeddings();
  } catch (err) {
    errorBanner.hidden = false;
    errorText.textContent = `cannot reach service at ${baseUrl}: ${err}`;
    return;
  }
  embeddingSelect.replaceChildren(
    ...embeddings.map((emb) => {
      const opt = document.createElement("option");
      opt.value = emb.id;
      opt.textContent = `${emb.id} (${emb.n_items} items, ${emb.dim}-d)`;
      return opt;
    }),
  );
  startButton.disabled = embeddings.length === 0;
  render();
}

void init();
