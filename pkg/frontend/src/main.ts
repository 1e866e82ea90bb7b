import { ApiClient } from "./api.js";
import { renderApp } from "./render.js";
import { Store } from "./state.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const store = new Store(new ApiClient());
store.subscribe(() => {
  renderApp(root, store);
  const fragment = store.fragment();
  if (window.location.hash !== fragment && store.network) {
    history.replaceState(null, "", fragment);
  }
});
void store.init(window.location.hash);
