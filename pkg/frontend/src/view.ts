// Pure rendering of a SessionView to HTML. Keeping this a string-level
// function makes "same view, same bytes" testable without a DOM.

import { RefusalPanel, SessionView } from "./controller.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderChoices(view: SessionView): string {
  if (!view.choices.length) {
    if (view.status?.kind === "terminated") {
      return `<p class="muted">no further choices</p>`;
    }
    return view.sessionId ? `<p class="muted">deadlock: no choices</p>` : "";
  }
  const buttons = view.choices.map((c) => {
    const key = `data-kind="${c.kind}" data-index="${c.index}"`;
    if (c.kind === "ext") {
      return `<button class="choice ext" ${key}>${escapeHtml(c.label ?? "")}</button>`;
    }
    if (c.kind === "int") {
      return `<button class="choice int" ${key}>τ</button>`;
    }
    return `<button class="choice tick" ${key}>✓ ${escapeHtml(c.value ?? "")}</button>`;
  });
  return `<div class="choices">${buttons.join("")}</div>`;
}

function renderHistory(view: SessionView): string {
  if (!view.history.length) {
    return `<p class="muted">no steps yet</p>`;
  }
  const items = view.history.map((entry) => {
    if (entry.kind === "ext") {
      return `<li class="step ext">${escapeHtml(entry.label ?? "")}</li>`;
    }
    if (entry.kind === "int") {
      return `<li class="step int"><span class="tau-badge">τ</span></li>`;
    }
    return `<li class="step tick">✓ ${escapeHtml(entry.value ?? "")}</li>`;
  });
  return `<ol class="history">${items.join("")}</ol>`;
}

export function renderRefusals(panel: RefusalPanel): string {
  if (!panel.stable) {
    return `<p class="refusals unstable">unstable (silent steps pending)</p>`;
  }
  const initials = panel.initials.length
    ? panel.initials.map(escapeHtml).join(", ")
    : "∅";
  return `<div class="refusals stable"><p>initials: {${initials}}</p>` +
    `<p>${escapeHtml(panel.note)}</p></div>`;
}

function renderLts(view: SessionView): string {
  if (view.ltsNote) {
    return `<p class="muted">${escapeHtml(view.ltsNote)}</p>`;
  }
  if (!view.lts) {
    return "";
  }
  const states = view.lts.states
    .map((s) => {
      const mark = s.kind === "terminated" ? " ⊙" : "";
      const init = s.id === view.lts!.initial ? " ←start" : "";
      return `<li>s${s.id}: ${escapeHtml(s.term)}${mark}${init}</li>`;
    })
    .join("");
  const edges = view.lts.edges
    .map((e) => {
      const a = e.action;
      const label =
        a.type === "visible" ? escapeHtml(a.label ?? "")
        : a.type === "tau" ? "τ"
        : `✓ ${escapeHtml(a.value ?? "")}`;
      const cls = a.type === "tau" ? ` class="tau-edge"` : "";
      return `<li${cls}>s${e.from} —${label}→ s${e.to}</li>`;
    })
    .join("");
  return `<div class="lts"><h3>transition graph</h3>` +
    `<ul class="lts-states">${states}</ul>` +
    `<ul class="lts-edges">${edges}</ul></div>`;
}

export function renderApp(view: SessionView, refusals: RefusalPanel): string {
  const parts: string[] = [];
  if (view.banner) {
    parts.push(`<div class="banner error">${escapeHtml(view.banner)}</div>`);
  }
  if (view.toast) {
    parts.push(`<div class="toast">${escapeHtml(view.toast)}</div>`);
  }
  if (view.sessionId) {
    parts.push(`<h2 class="term">${escapeHtml(view.termText)}</h2>`);
    if (view.status?.kind === "terminated") {
      parts.push(
        `<div class="banner terminated">terminated with ` +
        `<strong>${escapeHtml(view.status.value ?? "")}</strong></div>`,
      );
    }
    parts.push(renderChoices(view));
    parts.push(`<button id="undo">undo</button>`);
    parts.push(`<button id="show-lts">graph</button>`);
    parts.push(`<h3>trace</h3><p class="trace">[${
      view.historyTrace.map(escapeHtml).join(", ")
    }]</p>`);
    parts.push(`<h3>history</h3>`);
    parts.push(renderHistory(view));
    parts.push(`<h3>refusals</h3>`);
    parts.push(renderRefusals(refusals));
    parts.push(renderLts(view));
  }
  return parts.join("\n");
}
