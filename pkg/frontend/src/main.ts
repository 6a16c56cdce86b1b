/** Browser entry point. The monitor serves this bundle from its own origin,
 * so the API base is simply the empty string. */

import { initApp } from "./app.js";
import { MonitorApi } from "./api.js";

const root = document.getElementById("app");
if (root) {
  initApp({ root, win: window, api: new MonitorApi("") });
}
