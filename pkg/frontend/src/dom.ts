// Browser wiring: binds the editor controller to the page. Everything
// testable lives in state.ts / editor.ts; this file only touches the DOM.

import { ApiClient } from "./api.js";
import { EditorController } from "./editor.js";
import { exportTsvLine, type EditorState } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export async function mount(baseUrl: string): Promise<EditorController> {
  const api = new ApiClient(baseUrl);
  const controller = new EditorController(api);

  const difficultBox = el<HTMLTextAreaElement>("difficult");
  const systemPicker = el<HTMLSelectElement>("system");
  const startButton = el<HTMLButtonElement>("start");
  const typedView = el<HTMLElement>("typed");
  const wordBox = el<HTMLInputElement>("word");
  const suggestionsView = el<HTMLOListElement>("suggestions");
  const statusView = el<HTMLElement>("status");
  const exportButton = el<HTMLButtonElement>("export");

  for (const systemId of await api.systems()) {
    const option = document.createElement("option");
    option.value = systemId;
    option.textContent = systemId;
    systemPicker.appendChild(option);
  }

  function render(state: EditorState): void {
    typedView.textContent = state.typed.join(" ");
    statusView.textContent =
      state.connection === "error" ? `error: ${state.lastError}` : state.connection;
    statusView.className = `status ${state.connection}`;
    suggestionsView.replaceChildren();
    state.suggestions.forEach((s, i) => {
      const item = document.createElement("li");
      const label = document.createElement("span");
      label.textContent = `${s.word}`;
      const prob = document.createElement("small");
      prob.textContent = ` ${(s.prob * 100).toFixed(1)}%`;
      item.appendChild(label);
      item.appendChild(prob);
      if (state.winner) {
        const badge = document.createElement("em");
        badge.className = "winner-badge";
        badge.textContent = ` ${state.winner}`;
        item.appendChild(badge);
      }
      item.addEventListener("click", () => void controller.accept(i + 1));
      suggestionsView.appendChild(item);
    });
    if (wordBox.value !== state.pending) wordBox.value = state.pending;
  }

  controller.subscribe(render);

  startButton.addEventListener("click", () => {
    const difficult = difficultBox.value.trim();
    if (!difficult) return;
    void controller.start(difficult, systemPicker.value);
    wordBox.focus();
  });

  wordBox.addEventListener("input", () => controller.onInput(wordBox.value));

  wordBox.addEventListener("keydown", (ev) => {
    if (wordBox.value === "" && controller.onDigitKey(ev.key)) {
      ev.preventDefault();
      return;
    }
    if (ev.key === "Backspace" && wordBox.value === "") {
      ev.preventDefault();
      void controller.backspace();
    }
  });

  exportButton.addEventListener("click", () => {
    const line = exportTsvLine(
      controller.state,
      `manual-${Date.now()}`,
      difficultBox.value.split(/\s+/).slice(0, 4).join(" "),
    );
    const blob = new Blob([line + "\n"], { type: "text/tab-separated-values" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "simplification.tsv";
    link.click();
    URL.revokeObjectURL(link.href);
  });

  return controller;
}

const base =
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8080";
void mount(base);
