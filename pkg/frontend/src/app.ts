/**
 * Entry point: mount the explorer against a running analysis service.
 *
 * The service origin comes from the ``?service=`` query parameter and
 * defaults to the page's own origin (the usual deployment is the
 * explorer served as static files next to the service).
 */

import { SessionClient } from "./api.js";
import { renderApp } from "./render.js";
import { ExplorerViewModel } from "./viewmodel.js";

export function mount(root: HTMLElement, serviceUrl: string): ExplorerViewModel {
  const client = new SessionClient(serviceUrl);
  const vm = new ExplorerViewModel(client);
  vm.onChange = () => renderApp(vm, root);
  renderApp(vm, root);
  return vm;
}

export function main(): void {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  const service =
    new URLSearchParams(window.location.search).get("service") ??
    window.location.origin;
  mount(root, service);
}
