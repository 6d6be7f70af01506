import { WorkbenchApp } from "./dom.js";
import { fetchPost, GatewayClient } from "./gateway.js";
import { Workbench } from "./workbench.js";

const client = new GatewayClient(fetchPost("/gateway"));
const workbench = new Workbench(client);
const app = new WorkbenchApp(document.getElementById("app")!, workbench);
app.mount();
