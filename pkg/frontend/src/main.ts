import { HttpApiClient } from "./api.js";
import { initApp } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
initApp(root, new HttpApiClient());
