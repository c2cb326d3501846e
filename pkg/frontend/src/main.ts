/** Browser entry point: mount the app on #app against the same origin. */

import { initApp } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount element");
}
initApp(root, { baseUrl: "" });
