/** Bootstrap: wire the service client, the store, and the DOM renderer.
 * Configuration is a single value: the service base URL (`?api=` query
 * parameter, defaulting to same origin).
 */

import { ApiClient } from "./api.js";
import { SessionStore } from "./store.js";
import { render } from "./view.js";

const base = new URLSearchParams(window.location.search).get("api") ?? "";
const store = new SessionStore(new ApiClient(base));
const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

store.subscribe(() => render(store, root));
render(store, root);
void store.load();
