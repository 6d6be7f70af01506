// @vitest-environment happy-dom
/** DOM projection: menu, lazy page elements, manager list, panel geometry. */

import { beforeEach, describe, expect, it } from "vitest";

import { WorkbenchApp } from "../src/dom.js";
import { GatewayClient } from "../src/gateway.js";
import { Workbench } from "../src/workbench.js";
import { FakeServer } from "./fakeGateway.js";

let app: WorkbenchApp;
let workbench: Workbench;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  const server = new FakeServer();
  workbench = new Workbench(new GatewayClient(server.post));
  app = new WorkbenchApp(document.getElementById("app")!, workbench);
  app.mount();
});

function click(selector: string): void {
  const node = document.querySelector(selector);
  if (!node) throw new Error(`nothing matches ${selector}`);
  (node as HTMLElement).click();
}

describe("chrome", () => {
  it("renders the five menu entries and hides Logout while anonymous", () => {
    const items = document.querySelectorAll(".menu-item");
    expect(items).toHaveLength(5);
    const logout = document.querySelector(".logout-button") as HTMLElement;
    expect(logout.style.display).toBe("none");
  });

  it("creates page elements lazily and keeps them alive", () => {
    expect(document.querySelectorAll(".page")).toHaveLength(1);
    click('[data-page="components"]');
    expect(document.querySelectorAll(".page")).toHaveLength(2);
    click('[data-page="home"]');
    click('[data-page="components"]');
    expect(document.querySelectorAll(".page")).toHaveLength(2);
    expect(workbench.constructionCount("components")).toBe(1);
  });

  it("preserves typed field text across navigation in the document", () => {
    click('[data-page="search"]');
    const input = document.querySelector(".search-box input") as HTMLInputElement;
    input.value = "gear box";
    input.dispatchEvent(new Event("input"));
    click('[data-page="home"]');
    click('[data-page="search"]');
    const again = document.querySelector(".search-box input") as HTMLInputElement;
    expect(again.value).toBe("gear box");
  });
});

describe("components page", () => {
  beforeEach(() => {
    click('[data-page="components"]');
  });

  it("lists exactly the two public components with a zero counter", () => {
    expect(document.querySelectorAll(".manager-entry")).toHaveLength(2);
    expect(document.querySelector(".manager-counter")!.textContent).toBe("0 shown");
  });

  it("opens a panel and counts it", () => {
    click('[data-component-id="clock"]');
    expect(document.querySelectorAll(".panel")).toHaveLength(1);
    expect(document.querySelector(".manager-counter")!.textContent).toBe("1 shown");
    click(".panel-close");
    expect(document.querySelectorAll(".panel")).toHaveLength(0);
    expect(document.querySelector(".manager-counter")!.textContent).toBe("0 shown");
  });

  it("positions panels from the workbench geometry", () => {
    click('[data-component-id="clock"]');
    workbench.dragPanel("clock", 60, 25);
    app.syncPanels();
    const panel = document.querySelector(".panel") as HTMLElement;
    const window = workbench.getWindow("clock")!;
    expect(panel.style.left).toBe(`${window.x}px`);
    expect(panel.style.top).toBe(`${window.y}px`);
  });
});

describe("login through the form", () => {
  it("shows Logout, six manager entries and applied settings", async () => {
    click('[data-page="search"]');
    const [username, password] = Array.from(
      document.querySelectorAll(".auth-box input"),
    ) as HTMLInputElement[];
    username.value = "alice";
    username.dispatchEvent(new Event("input"));
    password.value = "secret1";
    const buttons = Array.from(document.querySelectorAll(".auth-box button"));
    (buttons.find((b) => b.textContent === "Register") as HTMLElement).click();
    await new Promise((resolve) => setTimeout(resolve, 20));

    expect((document.querySelector(".logout-button") as HTMLElement).style.display).toBe("");
    click('[data-page="components"]');
    expect(document.querySelectorAll(".manager-entry")).toHaveLength(6);

    await workbench.saveSettingsFlow({
      background_color: "#112233",
      font_family: "serif",
      font_size: 18,
      theme: "dark",
    });
    app.applySettings(workbench.settings);
    const root = document.getElementById("app")!;
    expect(root.style.fontSize).toBe("18pt");
    expect(root.classList.contains("theme-dark")).toBe(true);
  });
});
