/**
 * DOM projection of the workbench: menu bar, lazily-created pages,
 * component manager window, draggable panels, settings application.
 * All state decisions live in workbench.ts; this layer renders and
 * forwards events.
 */

import { AmfValue } from "./amf3.js";
import { descriptorFor } from "./catalog.js";
import { FaultError } from "./gateway.js";
import { PAGE_IDS, PageId, PanelWindow, UiSettings, Workbench } from "./workbench.js";
import { calculate, clockText } from "./widgets.js";

const PAGE_TITLES: Record<PageId, string> = {
  home: "Home",
  search: "Search",
  about: "About us",
  team: "Team",
  components: "Components",
};

export class WorkbenchApp {
  private pageElements = new Map<PageId, HTMLElement>();
  private panelElements = new Map<string, HTMLElement>();
  private menuButtons = new Map<PageId, HTMLButtonElement>();
  private logoutButton!: HTMLButtonElement;
  private pageHost!: HTMLElement;
  private managerList!: HTMLElement;
  private managerCounter!: HTMLElement;
  private userArea!: HTMLElement;
  private chatTimer: ReturnType<typeof setInterval> | undefined;

  constructor(
    private readonly root: HTMLElement,
    readonly workbench: Workbench,
  ) {}

  mount(): void {
    this.root.innerHTML = "";
    this.root.appendChild(this.buildMenuBar());
    this.pageHost = el("div", "page-host");
    this.root.appendChild(this.pageHost);
    this.applySettings(this.workbench.settings);
    this.showPage("home");
    this.chatTimer = setInterval(() => void this.pollChatIfVisible(), 2000);
  }

  unmount(): void {
    if (this.chatTimer !== undefined) clearInterval(this.chatTimer);
  }

  // -- chrome ------------------------------------------------------------

  private buildMenuBar(): HTMLElement {
    const bar = el("nav", "menu-bar");
    for (const page of PAGE_IDS) {
      const button = el("button", "menu-item") as HTMLButtonElement;
      button.textContent = PAGE_TITLES[page];
      button.dataset.page = page;
      button.addEventListener("click", () => this.showPage(page));
      this.menuButtons.set(page, button);
      bar.appendChild(button);
    }
    this.logoutButton = el("button", "logout-button") as HTMLButtonElement;
    this.logoutButton.textContent = "Logout";
    this.logoutButton.addEventListener("click", () => void this.doLogout());
    bar.appendChild(this.logoutButton);
    this.refreshChrome();
    return bar;
  }

  refreshChrome(): void {
    this.logoutButton.style.display = this.workbench.logoutVisible() ? "" : "none";
    if (this.managerList) this.renderManager();
  }

  applySettings(settings: UiSettings): void {
    this.root.style.backgroundColor = settings.background_color;
    this.root.style.fontFamily = settings.font_family;
    this.root.style.fontSize = `${settings.font_size}pt`;
    this.root.classList.toggle("theme-dark", settings.theme === "dark");
    this.root.classList.toggle("theme-light", settings.theme !== "dark");
  }

  // -- pages ---------------------------------------------------------------

  showPage(page: PageId): void {
    this.workbench.navigate(page);
    if (!this.pageElements.has(page)) {
      this.pageElements.set(page, this.buildPage(page));
      this.pageHost.appendChild(this.pageElements.get(page)!);
    }
    for (const [id, element] of this.pageElements) {
      element.style.display = id === page ? "" : "none";
    }
    for (const [id, button] of this.menuButtons) {
      button.classList.toggle("active", id === page);
    }
  }

  private buildPage(page: PageId): HTMLElement {
    const container = el("section", `page page-${page}`);
    switch (page) {
      case "home":
        container.appendChild(
          text("p", "A flexible component workbench. Log in on the Search page to unlock every component, search the catalog, and chat."),
        );
        break;
      case "search":
        this.buildSearchPage(container);
        break;
      case "about":
        container.appendChild(text("p", "Contact: workbench@example.invalid"));
        break;
      case "team":
        container.appendChild(text("p", "Built by the workbench team."));
        break;
      case "components":
        this.buildComponentsPage(container);
        break;
    }
    return container;
  }

  private bindField(input: HTMLInputElement, page: PageId, key: string): void {
    const state = this.workbench.navigate(page);
    input.value = state.fields.get(key) ?? "";
    input.addEventListener("input", () => state.fields.set(key, input.value));
  }

  private buildSearchPage(container: HTMLElement): void {
    const authBox = el("div", "auth-box");
    const username = inputEl("text", "username");
    const password = inputEl("password", "password");
    this.bindField(username, "search", "username");
    const authStatus = el("span", "inline-status");
    const loginButton = buttonEl("Log in");
    const registerButton = buttonEl("Register");
    const run = async (flow: "login" | "register") => {
      authStatus.textContent = "…";
      try {
        if (flow === "login") await this.workbench.loginFlow(username.value, password.value);
        else await this.workbench.registerFlow(username.value, password.value);
        authStatus.textContent = `signed in as ${username.value}`;
        this.applySettings(this.workbench.settings);
        this.refreshChrome();
        this.syncPanels();
      } catch (err) {
        authStatus.textContent = errText(err);
        this.refreshChrome();
      }
    };
    loginButton.addEventListener("click", () => void run("login"));
    registerButton.addEventListener("click", () => void run("register"));
    authBox.append(username, password, loginButton, registerButton, authStatus);
    container.appendChild(authBox);

    const searchBox = el("div", "search-box");
    const mode = document.createElement("select");
    for (const value of ["phrase", "sql"]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      mode.appendChild(option);
    }
    const query = inputEl("text", "query");
    this.bindField(query, "search", "query");
    const goButton = buttonEl("Search");
    const searchStatus = el("span", "inline-status");
    const results = el("div", "search-results");
    goButton.addEventListener("click", () => {
      searchStatus.textContent = "…";
      void this.workbench
        .searchFlow(mode.value as "phrase" | "sql", query.value)
        .then((outcome) => {
          searchStatus.textContent = `${outcome.total} rows for ${outcome.interpreted}`;
          results.innerHTML = "";
          results.appendChild(renderTable(outcome.columns, outcome.rows));
        })
        .catch((err) => {
          searchStatus.textContent = errText(err);
        });
    });
    searchBox.append(mode, query, goButton, searchStatus);
    container.append(searchBox, results);
  }

  // -- components page ----------------------------------------------------

  private buildComponentsPage(container: HTMLElement): void {
    const manager = el("div", "manager-window window");
    manager.appendChild(text("header", "Component manager"));
    this.managerList = el("div", "manager-list");
    manager.appendChild(this.managerList);
    const managerFooter = el("footer", "manager-footer");
    this.managerCounter = el("span", "manager-counter");
    managerFooter.appendChild(this.managerCounter);
    const saveButton = buttonEl("Save layout");
    saveButton.classList.add("save-layout");
    saveButton.addEventListener("click", () => {
      void this.workbench
        .saveLayoutFlow()
        .then(() => this.flashCounter("layout saved"))
        .catch((err) => this.flashCounter(errText(err)));
    });
    managerFooter.appendChild(saveButton);
    manager.appendChild(managerFooter);
    this.userArea = el("div", "user-area");
    container.append(manager, this.userArea);
    this.renderManager();
  }

  private flashCounter(message: string): void {
    this.managerCounter.textContent = `${message} — ${this.workbench.counter()} shown`;
  }

  renderManager(): void {
    if (!this.managerList) return;
    this.managerList.innerHTML = "";
    for (const descriptor of this.workbench.visibleDescriptors()) {
      const entry = buttonEl(descriptor.title);
      entry.classList.add("manager-entry");
      entry.dataset.componentId = descriptor.componentId;
      entry.addEventListener("click", () => {
        this.workbench.openComponent(descriptor.componentId);
        this.syncPanels();
      });
      this.managerList.appendChild(entry);
    }
    this.managerCounter.textContent = `${this.workbench.counter()} shown`;
  }

  /** Reconcile panel elements with the workbench's window list. */
  syncPanels(): void {
    if (!this.userArea) {
      this.renderCounterOnly();
      return;
    }
    const wanted = new Set(this.workbench.openWindows().map((w) => w.componentId));
    for (const [id, element] of this.panelElements) {
      if (!wanted.has(id)) {
        element.remove();
        this.panelElements.delete(id);
      }
    }
    for (const window of this.workbench.openWindows()) {
      let element = this.panelElements.get(window.componentId);
      if (!element) {
        element = this.buildPanel(window);
        this.panelElements.set(window.componentId, element);
        this.userArea.appendChild(element);
      }
      element.style.left = `${window.x}px`;
      element.style.top = `${window.y}px`;
      element.style.zIndex = String(window.zOrder);
      element.style.display = window.visible ? "" : "none";
      const status = element.querySelector(".panel-status");
      if (status) status.textContent = window.status;
    }
    this.renderCounterOnly();
  }

  private renderCounterOnly(): void {
    if (this.managerCounter) {
      this.managerCounter.textContent = `${this.workbench.counter()} shown`;
    }
  }

  private buildPanel(window: PanelWindow): HTMLElement {
    const descriptor = descriptorFor(window.componentId)!;
    const panel = el("div", `panel window panel-${window.componentId}`);
    const grip = el("header", "panel-grip");
    grip.appendChild(text("span", descriptor.title));
    const close = buttonEl("×");
    close.classList.add("panel-close");
    close.addEventListener("click", () => {
      this.workbench.closePanel(window.componentId);
      this.syncPanels();
    });
    grip.appendChild(close);
    panel.appendChild(grip);
    this.makeDraggable(grip, window.componentId);
    panel.appendChild(this.buildPanelBody(window.componentId));
    panel.appendChild(el("footer", "panel-status"));
    return panel;
  }

  private makeDraggable(grip: HTMLElement, componentId: string): void {
    let lastX = 0;
    let lastY = 0;
    let dragging = false;
    grip.addEventListener("pointerdown", (event) => {
      dragging = true;
      lastX = event.clientX;
      lastY = event.clientY;
      grip.setPointerCapture?.(event.pointerId);
    });
    grip.addEventListener("pointermove", (event) => {
      if (!dragging) return;
      this.workbench.dragPanel(componentId, event.clientX - lastX, event.clientY - lastY);
      lastX = event.clientX;
      lastY = event.clientY;
      this.syncPanels();
    });
    grip.addEventListener("pointerup", () => {
      dragging = false;
    });
  }

  private buildPanelBody(componentId: string): HTMLElement {
    const body = el("div", "panel-body");
    switch (componentId) {
      case "clock": {
        const label = el("span", "clock-label");
        label.textContent = clockText(new Date());
        setInterval(() => {
          label.textContent = clockText(new Date());
        }, 1000);
        body.appendChild(label);
        break;
      }
      case "calculator": {
        const expr = inputEl("text", "1+2*3");
        const out = el("span", "calc-out");
        const eq = buttonEl("=");
        eq.addEventListener("click", () => {
          try {
            out.textContent = String(calculate(expr.value));
          } catch (err) {
            out.textContent = errText(err);
          }
        });
        body.append(expr, eq, out);
        break;
      }
      case "chat": {
        const transcript = el("div", "chat-transcript");
        const line = inputEl("text", "say something");
        const send = buttonEl("Send");
        send.addEventListener("click", () => {
          void this.workbench
            .sendChat(line.value)
            .then(() => {
              line.value = "";
              this.renderChat(transcript);
            })
            .catch((err) => this.workbench.setStatus("chat", errText(err)))
            .finally(() => this.syncPanels());
        });
        body.append(transcript, line, send);
        break;
      }
      case "notes": {
        const area = document.createElement("textarea");
        area.placeholder = "notes travel with your saved layout";
        body.appendChild(area);
        break;
      }
      case "actionlog": {
        const list = el("ul", "log-list");
        const refresh = buttonEl("Refresh");
        refresh.addEventListener("click", () => {
          void this.workbench
            .actionLog(20)
            .then((entries) => {
              list.innerHTML = "";
              for (const entry of entries) {
                list.appendChild(text("li", `${entry.ts} ${entry.action}`));
              }
            })
            .catch((err) => {
              this.workbench.setStatus("actionlog", errText(err));
              this.syncPanels();
            });
        });
        body.append(refresh, list);
        break;
      }
      case "searchgrid": {
        const query = inputEl("text", "SELECT * FROM records LIMIT 5");
        const go = buttonEl("Run");
        const grid = el("div", "grid-out");
        go.addEventListener("click", () => {
          void this.workbench
            .searchFlow("sql", query.value)
            .then((outcome) => {
              grid.innerHTML = "";
              grid.appendChild(renderTable(outcome.columns, outcome.rows));
            })
            .catch((err) => {
              this.workbench.setStatus("searchgrid", errText(err));
              this.syncPanels();
            });
        });
        body.append(query, go, grid);
        break;
      }
    }
    return body;
  }

  private renderChat(transcript: HTMLElement): void {
    transcript.innerHTML = "";
    for (const message of this.workbench.chatMessages) {
      transcript.appendChild(text("div", `${message.sender}: ${message.text}`));
    }
  }

  private async pollChatIfVisible(): Promise<void> {
    const chatWindow = this.workbench.getWindow("chat");
    if (!chatWindow || !chatWindow.visible) return; // timer suspended while hidden
    if (this.workbench.currentPage !== "components") return;
    if (!this.workbench.logoutVisible()) return;
    try {
      await this.workbench.pollChat();
      const transcript = this.panelElements.get("chat")?.querySelector(".chat-transcript");
      if (transcript) this.renderChat(transcript as HTMLElement);
    } catch (err) {
      this.workbench.setStatus("chat", errText(err));
      this.syncPanels();
    }
  }

  private async doLogout(): Promise<void> {
    await this.workbench.logoutFlow().catch(() => undefined);
    this.applySettings(this.workbench.settings);
    this.refreshChrome();
    this.syncPanels();
  }
}

// -- small DOM helpers ------------------------------------------------------

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}

function text(tag: string, content: string): HTMLElement {
  const node = document.createElement(tag);
  node.textContent = content;
  return node;
}

function inputEl(type: string, placeholder: string): HTMLInputElement {
  const node = document.createElement("input");
  node.type = type;
  node.placeholder = placeholder;
  return node;
}

function buttonEl(label: string): HTMLButtonElement {
  const node = document.createElement("button");
  node.textContent = label;
  return node;
}

function renderTable(columns: string[], rows: AmfValue[][]): HTMLElement {
  const table = document.createElement("table");
  const head = table.createTHead().insertRow();
  for (const column of columns) {
    const cell = document.createElement("th");
    cell.textContent = column;
    head.appendChild(cell);
  }
  const body = table.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    for (const cell of row) {
      tr.insertCell().textContent = String(cell);
    }
  }
  return table;
}

function errText(err: unknown): string {
  if (err instanceof FaultError) return `${err.code}: ${err.faultMessage}`;
  return err instanceof Error ? err.message : String(err);
}
