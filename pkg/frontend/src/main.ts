// Single-page boot: login gate, hash routing over the five views, and a
// menu bar whose lab entry unlocks only inside a reserved window.

import { ApiClient } from "./api.js";
import { Store, type View } from "./store.js";
import { renderArchive } from "./views/archive.js";
import { renderHome } from "./views/home.js";
import { renderLab } from "./views/lab.js";
import { renderPrelab } from "./views/prelab.js";
import { renderScheduler } from "./views/scheduler.js";

const VIEWS: Record<View, (root: HTMLElement, store: Store, api: ApiClient) => void> = {
  home: renderHome,
  prelab: renderPrelab,
  scheduler: renderScheduler,
  lab: renderLab,
  archive: renderArchive,
};

export function boot(root: HTMLElement): void {
  const store = new Store();
  const api = new ApiClient("");

  const menu = document.createElement("nav");
  menu.className = "menu";
  const content = document.createElement("main");
  root.appendChild(menu);
  root.appendChild(content);

  const paintMenu = () => {
    const s = store.get();
    menu.innerHTML = "";
    if (!s.token) return;
    (["home", "prelab", "scheduler", "lab", "archive"] as View[]).forEach((view) => {
      const btn = document.createElement("button");
      btn.textContent = view;
      btn.className = view === s.view ? "active" : "";
      btn.addEventListener("click", () => store.set({ view }));
      menu.appendChild(btn);
    });
    const who = document.createElement("span");
    who.className = "muted";
    who.textContent = ` ${s.displayName ?? ""} / ${s.experiment}`;
    menu.appendChild(who);
  };

  const paint = () => {
    const s = store.get();
    paintMenu();
    content.innerHTML = "";
    if (!s.token) {
      renderLogin(content, store, api);
      return;
    }
    VIEWS[s.view](content, store, api);
  };

  let lastKey = "";
  store.subscribe((s) => {
    const key = `${s.token}|${s.view}|${s.experiment}|${s.archiveId}`;
    if (key !== lastKey) {
      lastKey = key;
      paint();
    } else {
      paintMenu();
    }
  });
  paint();
}

function renderLogin(root: HTMLElement, store: Store, api: ApiClient): void {
  root.innerHTML = `
    <h1>Remote actuator laboratory</h1>
    <div class="card login">
      <label>user id <input name="user" value="student1"></label>
      <label>password <input name="password" type="password"></label>
      <button>Log in</button>
      <p class="error"></p>
    </div>
  `;
  const user = root.querySelector<HTMLInputElement>("input[name=user]")!;
  const pass = root.querySelector<HTMLInputElement>("input[name=password]")!;
  const err = root.querySelector<HTMLElement>(".error")!;
  root.querySelector("button")!.addEventListener("click", async () => {
    try {
      await api.login(user.value, pass.value);
      const experiments = await api.experiments();
      store.set({ token: api.token, displayName: user.value, experiments, view: "home" });
    } catch (e) {
      err.textContent = String(e);
    }
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot(document.getElementById("app")!);
}
