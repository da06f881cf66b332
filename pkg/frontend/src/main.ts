/**
 * Browser entry point. Attaches to the session named in the `?session=` query
 * parameter, or creates a fresh one, then hands everything to the controller.
 * The API origin defaults to the page's own and can be overridden with
 * `?api=http://host:port` when the UI is served statically elsewhere.
 */

import { AppController } from "./app.js";
import { HttpClient } from "./client.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app mount point");
  }
  const params = new URLSearchParams(window.location.search);
  const base = (params.get("api") ?? "").replace(/\/$/, "");
  const client = new HttpClient(base);
  let sessionId = params.get("session");
  if (!sessionId) {
    const created = await client.createSession({ deterministic_clock: false });
    sessionId = created.session_id;
    params.set("session", sessionId);
    window.history.replaceState(null, "", `?${params.toString()}`);
  }
  const controller = new AppController({ client, sessionId, root, base });
  controller.connect();
}

void boot();
