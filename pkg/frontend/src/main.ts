// Bootstrap: hash routing between the session list and a session detail,
// toast surface, and the long-poll event loop for the open session.

import { ApiClient } from "./api.js";
import { el, button } from "./dom.js";
import { Dashboard } from "./store.js";
import { renderDetail } from "./views/detail.js";
import { renderSessionList } from "./views/list.js";

const api = new ApiClient("");
const store = new Dashboard(api);

function route(): { view: "list" } | { view: "session"; id: string } {
  const hash = window.location.hash;
  const match = hash.match(/^#\/session\/(.+)$/);
  if (match) {
    return { view: "session", id: decodeURIComponent(match[1]) };
  }
  return { view: "list" };
}

function renderToasts(root: HTMLElement): void {
  const existing = document.getElementById("toasts");
  existing?.remove();
  if (store.view.toasts.length === 0) return;
  const box = el("div", { id: "toasts" });
  for (const toast of store.view.toasts) {
    box.append(
      el("div", { class: `toast toast-${toast.kind}`, "data-kind": toast.kind }, [
        toast.message,
      ]),
    );
  }
  box.append(button("dismiss", () => store.dismissToasts(), { class: "ghost" }));
  root.append(box);
}

async function render(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const current = route();
  if (current.view === "list") {
    store.stopEvents();
    renderSessionList(root, store.sessions, (id) => {
      window.location.hash = `#/session/${id}`;
    });
  } else {
    const back = el("p", {}, []);
    const link = el("a", { href: "#/" }, ["← all sessions"]);
    back.append(link);
    renderDetail(root, store);
    root.prepend(back);
  }
  renderToasts(root);
}

async function onHashChange(): Promise<void> {
  const current = route();
  if (current.view === "session") {
    await store.openSession(current.id);
    void store.watchEvents();
  } else {
    store.stopEvents();
    await store.loadSessions();
  }
  await render();
}

async function start(): Promise<void> {
  store.subscribe(() => void render());
  window.addEventListener("hashchange", () => void onHashChange());
  await onHashChange();
}

document.addEventListener("DOMContentLoaded", () => void start());
