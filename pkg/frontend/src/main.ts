import { GatewayClient } from "./api.js";
import { App } from "./app.js";

const base = (window as { WELLBOT_BASE_URL?: string }).WELLBOT_BASE_URL ?? "";
const app = new App(new GatewayClient(base));
document.getElementById("root")?.appendChild(app.element);
app.start().catch((error) => {
  console.error("failed to start", error);
  const banner = document.createElement("div");
  banner.className = "hint";
  banner.textContent = "could not reach the gateway; is `wellbot serve` running?";
  document.getElementById("root")?.appendChild(banner);
});
