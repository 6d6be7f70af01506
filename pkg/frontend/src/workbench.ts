/**
 * DOM-free workbench state machine: lazily-created pages whose state
 * survives navigation, the login-gated component manager with its
 * displayed-window counter, draggable panel windows, layout capture and
 * restore, and the login/logout flows that load settings and restore the
 * saved layout.  A rendering layer (dom.ts) projects this state into the
 * document; tests drive it directly.
 */

import { AmfValue } from "./amf3.js";
import { COMPONENT_CATALOG, ComponentDescriptor, descriptorFor } from "./catalog.js";
import { FaultError, GatewayClient } from "./gateway.js";
import { ChatMessage, mergeMessages } from "./widgets.js";

export type PageId = "home" | "search" | "about" | "team" | "components";

export const PAGE_IDS: readonly PageId[] = ["home", "search", "about", "team", "components"];

export interface PageState {
  id: PageId;
  /** free-form per-page view state: field text, scroll offsets */
  fields: Map<string, string>;
  scroll: number;
}

export interface PanelWindow {
  componentId: string;
  x: number;
  y: number;
  visible: boolean;
  zOrder: number;
  status: string;
}

/** Wire shape of one persisted component state (snake_case keys). */
export interface ComponentState {
  component_id: string;
  x: number;
  y: number;
  visible: boolean;
  z_order: number;
  props: Record<string, string>;
}

export interface UiSettings {
  background_color: string;
  font_family: string;
  font_size: number;
  theme: string;
}

export const DEFAULT_SETTINGS: UiSettings = {
  background_color: "#FFFFFF",
  font_family: "sans-serif",
  font_size: 12,
  theme: "light",
};

export type AuthState =
  | { kind: "anonymous" }
  | { kind: "authenticated"; token: string; username: string };

export interface UserArea {
  width: number;
  height: number;
}

export interface SearchRows {
  columns: string[];
  rows: AmfValue[][];
  interpreted: string;
  total: number;
}

export class Workbench {
  auth: AuthState = { kind: "anonymous" };
  settings: UiSettings = { ...DEFAULT_SETTINGS };
  chatMessages: ChatMessage[] = [];
  chatCursor = 0;

  private pages = new Map<PageId, PageState>();
  private constructions = new Map<PageId, number>();
  private windows = new Map<string, PanelWindow>();
  private nextZ = 1;
  currentPage: PageId;

  constructor(
    private readonly client: GatewayClient,
    readonly userArea: UserArea = { width: 1600, height: 1000 },
  ) {
    this.currentPage = this.navigate("home").id;
  }

  // -- pages -----------------------------------------------------------

  /** First visit constructs the page; later visits re-show it unchanged. */
  navigate(page: PageId): PageState {
    let state = this.pages.get(page);
    if (!state) {
      state = { id: page, fields: new Map(), scroll: 0 };
      this.pages.set(page, state);
      this.constructions.set(page, (this.constructions.get(page) ?? 0) + 1);
    }
    this.currentPage = page;
    return state;
  }

  constructionCount(page: PageId): number {
    return this.constructions.get(page) ?? 0;
  }

  pageCreated(page: PageId): boolean {
    return this.pages.has(page);
  }

  // -- component manager -------------------------------------------------

  /** Anonymous sessions see exactly the public components; logins see all. */
  visibleDescriptors(): ComponentDescriptor[] {
    if (this.auth.kind === "authenticated") return [...COMPONENT_CATALOG];
    return COMPONENT_CATALOG.filter((d) => !d.requiresAuth);
  }

  /** The displayed-components counter shown at the bottom of the manager. */
  counter(): number {
    let n = 0;
    for (const window of this.windows.values()) if (window.visible) n++;
    return n;
  }

  openWindows(): PanelWindow[] {
    return [...this.windows.values()].sort((a, b) => a.zOrder - b.zOrder);
  }

  getWindow(componentId: string): PanelWindow | undefined {
    return this.windows.get(componentId);
  }

  openComponent(componentId: string): PanelWindow {
    const descriptor = descriptorFor(componentId);
    if (!descriptor) throw new Error(`no component '${componentId}'`);
    if (descriptor.requiresAuth && this.auth.kind !== "authenticated") {
      throw new Error(`component '${componentId}' needs a login`);
    }
    const existing = this.windows.get(componentId);
    if (existing) {
      existing.visible = true;
      return existing;
    }
    const window: PanelWindow = {
      componentId,
      x: 40 + (this.windows.size % 8) * 30,
      y: 40 + (this.windows.size % 8) * 24,
      visible: true,
      zOrder: this.nextZ++,
      status: "",
    };
    this.windows.set(componentId, window);
    return window;
  }

  /** Close removes the window from the user area and drops the counter. */
  closePanel(componentId: string): void {
    this.windows.delete(componentId);
  }

  /** Translate a panel, clamped to the user area on every edge. */
  dragPanel(componentId: string, dx: number, dy: number): PanelWindow {
    const window = this.windows.get(componentId);
    if (!window) throw new Error(`component '${componentId}' is not displayed`);
    window.x = Math.min(Math.max(window.x + dx, 0), this.userArea.width);
    window.y = Math.min(Math.max(window.y + dy, 0), this.userArea.height);
    return window;
  }

  setStatus(componentId: string, status: string): void {
    const window = this.windows.get(componentId);
    if (window) window.status = status;
  }

  // -- layout ----------------------------------------------------------

  /** Serialize every displayed window; restore(capture()) is a fixpoint. */
  captureLayout(): ComponentState[] {
    return this.openWindows().map((window) => ({
      component_id: window.componentId,
      x: Math.round(window.x),
      y: Math.round(window.y),
      visible: window.visible,
      z_order: window.zOrder,
      props: {},
    }));
  }

  restoreLayout(states: ComponentState[]): void {
    this.windows.clear();
    this.nextZ = 1;
    for (const state of states) {
      const descriptor = descriptorFor(state.component_id);
      if (!descriptor) continue; // stale id from an older catalog
      if (descriptor.requiresAuth && this.auth.kind !== "authenticated") continue;
      if (!state.visible) continue;
      this.windows.set(state.component_id, {
        componentId: state.component_id,
        x: state.x,
        y: state.y,
        visible: true,
        zOrder: state.z_order,
        status: "",
      });
      this.nextZ = Math.max(this.nextZ, state.z_order + 1);
    }
  }

  // -- session flows ------------------------------------------------------

  logoutVisible(): boolean {
    return this.auth.kind === "authenticated";
  }

  get token(): string {
    if (this.auth.kind !== "authenticated") throw new FaultError("auth.required", "login first", null);
    return this.auth.token;
  }

  /**
   * Login, then load and apply settings, then restore the saved layout;
   * the chat subscription starts at the moment of login.
   */
  async loginFlow(username: string, password: string): Promise<void> {
    await this.sessionFlow("auth.login", username, password);
  }

  async registerFlow(username: string, password: string): Promise<void> {
    await this.sessionFlow("auth.register", username, password);
  }

  private async sessionFlow(target: string, username: string, password: string): Promise<void> {
    const session = (await this.client.call(target, username, password)) as unknown as {
      token: string;
      username: string;
    };
    this.auth = { kind: "authenticated", token: session.token, username: session.username };
    this.chatMessages = [];
    this.chatCursor = 0; // server filters to post-login traffic
    this.settings = (await this.client.call(
      "gui.loadSettings",
      session.token,
    )) as unknown as UiSettings;
    const saved = (await this.client.call(
      "gui.loadStates",
      session.token,
    )) as unknown as ComponentState[];
    this.restoreLayout(saved);
  }

  async logoutFlow(): Promise<void> {
    if (this.auth.kind !== "authenticated") return;
    const token = this.auth.token;
    this.auth = { kind: "anonymous" };
    // only the public components stay on screen
    for (const window of [...this.windows.values()]) {
      const descriptor = descriptorFor(window.componentId);
      if (descriptor?.requiresAuth) this.windows.delete(window.componentId);
    }
    this.settings = { ...DEFAULT_SETTINGS };
    this.chatMessages = [];
    this.chatCursor = 0;
    await this.client.call("auth.logout", token);
  }

  async saveLayoutFlow(): Promise<void> {
    await this.client.call("gui.saveStates", this.token, this.captureLayout() as unknown as AmfValue);
  }

  async saveSettingsFlow(settings: UiSettings): Promise<void> {
    await this.client.call("gui.saveSettings", this.token, settings as unknown as AmfValue);
    this.settings = { ...settings };
  }

  // -- chat / search / log ----------------------------------------------------

  async sendChat(text: string): Promise<void> {
    const sent = (await this.client.call("chat.send", this.token, text)) as unknown as ChatMessage;
    const merged = mergeMessages(this.chatMessages, [sent]);
    this.chatMessages = merged.messages;
    this.chatCursor = Math.max(this.chatCursor, merged.cursor);
  }

  async pollChat(): Promise<ChatMessage[]> {
    const batch = (await this.client.call(
      "chat.poll",
      this.token,
      this.chatCursor,
    )) as unknown as ChatMessage[];
    const merged = mergeMessages(this.chatMessages, batch);
    this.chatMessages = merged.messages;
    this.chatCursor = Math.max(this.chatCursor, merged.cursor);
    return this.chatMessages;
  }

  async searchFlow(mode: "phrase" | "sql", query: string): Promise<SearchRows> {
    return (await this.client.call("search.run", this.token, mode, query)) as unknown as SearchRows;
  }

  async actionLog(limit: number): Promise<Array<Record<string, AmfValue>>> {
    return (await this.client.call("log.get", this.token, limit)) as Array<
      Record<string, AmfValue>
    >;
  }

  async echo(value: AmfValue): Promise<AmfValue> {
    return this.client.call("echo.echo", value);
  }
}
