// Run monitor: per-node status badges, lazily loaded thumbnails of produced
// artifacts, an event log, and a cancel control. Badge state mirrors the
// server (events or polled records) and is never predicted locally.

import type { AppStore } from "./store";

export class RunMonitor {
  constructor(
    readonly root: HTMLElement,
    readonly store: AppStore,
  ) {
    store.subscribe(() => this.render());
    this.render();
  }

  render(): void {
    const run = this.store.state.run;
    this.root.replaceChildren();
    if (!run) {
      const empty = document.createElement("p");
      empty.className = "monitor-empty";
      empty.textContent = "no active run";
      this.root.appendChild(empty);
      return;
    }

    const header = document.createElement("div");
    header.className = "monitor-header";
    const title = document.createElement("span");
    title.setAttribute("data-testid", "run-status");
    title.textContent = `run ${run.runId}: ${run.status}`;
    header.appendChild(title);
    if (run.transport === "polling") {
      const polling = document.createElement("span");
      polling.className = "transport-note";
      polling.textContent = "stream lost, polling";
      header.appendChild(polling);
    }
    const cancel = document.createElement("button");
    cancel.textContent = "cancel";
    cancel.setAttribute("data-testid", "cancel-run");
    cancel.disabled = run.status !== "running";
    cancel.addEventListener("click", () => void this.store.cancelRun());
    header.appendChild(cancel);
    this.root.appendChild(header);

    const list = document.createElement("ul");
    list.className = "node-badges";
    for (const nodeId of run.nodeOrder) {
      const item = document.createElement("li");
      item.setAttribute("data-node-badge", nodeId);
      item.setAttribute("data-status", run.badges[nodeId]);

      const name = document.createElement("span");
      name.textContent = nodeId;
      item.appendChild(name);

      const badge = document.createElement("span");
      badge.className = `badge badge-${run.badges[nodeId]}`;
      badge.textContent = run.badges[nodeId];
      item.appendChild(badge);

      const refs = run.artifacts[nodeId];
      if (refs) {
        for (const [port, ref] of Object.entries(refs)) {
          if (!ref.endsWith(".png")) continue;
          const img = document.createElement("img");
          img.className = "thumbnail";
          img.loading = "lazy";
          img.src = this.store.client.artifactUrl(run.runId, nodeId, port);
          img.alt = `${nodeId}.${port}`;
          img.addEventListener("click", () => this.showFull(nodeId, port));
          item.appendChild(img);
        }
      }
      const error = run.errors[nodeId];
      if (error) {
        const detail = document.createElement("details");
        const summary = document.createElement("summary");
        summary.textContent = "error";
        detail.appendChild(summary);
        const body = document.createElement("pre");
        body.setAttribute("data-testid", `error-${nodeId}`);
        body.textContent = error;
        detail.appendChild(body);
        item.appendChild(detail);
      }
      list.appendChild(item);
    }
    this.root.appendChild(list);

    const log = document.createElement("ol");
    log.className = "event-log";
    for (const event of run.eventLog) {
      const entry = document.createElement("li");
      entry.textContent = event.node
        ? `${event.event} ${event.node}${event.status ? " " + event.status : ""}`
        : `${event.event}${event.status ? " " + event.status : ""}`;
      log.appendChild(entry);
    }
    this.root.appendChild(log);
  }

  private showFull(nodeId: string, port: string): void {
    const run = this.store.state.run;
    if (!run) return;
    const overlay = document.createElement("div");
    overlay.className = "artifact-overlay";
    const img = document.createElement("img");
    img.src = this.store.client.artifactUrl(run.runId, nodeId, port);
    img.alt = `${nodeId}.${port} full size`;
    overlay.appendChild(img);
    overlay.addEventListener("click", () => overlay.remove());
    document.body.appendChild(overlay);
  }
}
