// Wiring: a source form on the left, the live session on the right. All
// clicks funnel through the controller, which queues them one at a time.

import { ApiClient } from "./api.js";
import { SessionController } from "./controller.js";
import { renderApp } from "./view.js";

const DEFAULT_SOURCE = `PAY : {paid} + {cancelled} = coin -> (SKIP paid [] cancel -> SKIP cancelled)
VEND : {done} = PAY >>= {inl paid -> tea -> SKIP done; inr cancelled -> refund -> SKIP done}
`;

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ??
    (document.querySelector<HTMLInputElement>("#api-base")?.value ||
      "http://127.0.0.1:8080");
}

function setup(): void {
  const root = document.querySelector<HTMLDivElement>("#app");
  if (!root) {
    throw new Error("missing #app container");
  }
  root.innerHTML = `
    <div class="layout">
      <aside class="left">
        <label>api base <input id="api-base" value="http://127.0.0.1:8080"></label>
        <label>process <input id="proc-name" value="VEND"></label>
        <textarea id="source" rows="10" spellcheck="false"></textarea>
        <button id="load">load</button>
      </aside>
      <main id="session"></main>
    </div>`;
  const source = document.querySelector<HTMLTextAreaElement>("#source")!;
  source.value = DEFAULT_SOURCE;
  const sessionPane = document.querySelector<HTMLDivElement>("#session")!;

  let controller: SessionController | null = null;

  const redraw = () => {
    if (!controller) {
      return;
    }
    sessionPane.innerHTML = renderApp(
      controller.getView(), controller.refusalPanel(),
    );
  };

  document.querySelector<HTMLButtonElement>("#load")!.addEventListener(
    "click", async () => {
      controller = new SessionController(new ApiClient(apiBase()));
      const name = document.querySelector<HTMLInputElement>("#proc-name")!.value;
      await controller.loadSpec(source.value, name);
      redraw();
    },
  );

  sessionPane.addEventListener("click", async (event) => {
    if (!controller) {
      return;
    }
    const target = event.target as HTMLElement;
    if (target.dataset.kind !== undefined) {
      await controller.stepChoice(
        target.dataset.kind, Number(target.dataset.index),
      );
      redraw();
    } else if (target.id === "undo") {
      await controller.undo();
      redraw();
    } else if (target.id === "show-lts") {
      await controller.loadLts();
      redraw();
    }
  });
}

setup();
