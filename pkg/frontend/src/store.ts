// Single client-side store. All compatibility decisions come from the
// server: an edge is accepted exactly when adding it introduces no new
// validation violation, and run badges only ever reflect received events or
// polled status, never local prediction.

import { GatewayClient } from "./api";
import { subscribeEvents, type SseSubscription } from "./sse";
import type {
  NodeStatus,
  PipelineDoc,
  PipelineEdge,
  RunEventDoc,
  RunRecordDoc,
  ServiceDescriptor,
  ValidateResult,
  Violation,
} from "./types";

export interface CanvasNode {
  nodeId: string;
  serviceId: string;
  x: number;
  y: number;
}

export interface EdgeVerdict {
  edge: PipelineEdge;
  accepted: boolean;
  code?: string;
  message?: string;
}

export interface RunView {
  runId: string;
  status: RunRecordDoc["status"] | "connecting";
  badges: Record<string, NodeStatus>;
  nodeOrder: string[];
  artifacts: Record<string, Record<string, string>>; // node -> port -> ref
  errors: Record<string, string>;
  eventLog: RunEventDoc[];
  transport: "stream" | "polling";
}

export interface AppState {
  services: ServiceDescriptor[];
  gatewayDown: boolean;
  nodes: CanvasNode[];
  edges: PipelineEdge[];
  inputs: Record<string, string>; // "node.port" -> artifact ref
  lastVerdict: EdgeVerdict | null;
  validation: ValidateResult | null;
  run: RunView | null;
}

type Listener = (state: AppState) => void;

const POLL_INTERVAL_MS = 2000;

export class AppStore {
  readonly state: AppState = {
    services: [],
    gatewayDown: false,
    nodes: [],
    edges: [],
    inputs: {},
    lastVerdict: null,
    validation: null,
    run: null,
  };

  private listeners = new Set<Listener>();
  private subscription: SseSubscription | null = null;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;
  private nodeCounter = 0;

  constructor(readonly client: GatewayClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify() {
    for (const listener of this.listeners) listener(this.state);
  }

  // -- services -----------------------------------------------------------

  async loadServices(): Promise<void> {
    try {
      this.state.services = await this.client.listServices();
      this.state.gatewayDown = false;
    } catch {
      this.state.gatewayDown = true;
    }
    this.notify();
  }

  service(serviceId: string): ServiceDescriptor | undefined {
    return this.state.services.find((s) => s.service_id === serviceId);
  }

  // -- canvas --------------------------------------------------------------

  addNode(serviceId: string, x = 40, y = 40): CanvasNode {
    const nodeId = this.uniqueNodeId(serviceId);
    const node = { nodeId, serviceId, x, y };
    this.state.nodes.push(node);
    this.notify();
    return node;
  }

  private uniqueNodeId(serviceId: string): string {
    if (!this.state.nodes.some((n) => n.nodeId === serviceId)) return serviceId;
    this.nodeCounter += 1;
    return `${serviceId}_${this.nodeCounter}`;
  }

  removeNode(nodeId: string): void {
    this.state.nodes = this.state.nodes.filter((n) => n.nodeId !== nodeId);
    this.state.edges = this.state.edges.filter(
      (e) => e.from !== nodeId && e.to !== nodeId,
    );
    for (const key of Object.keys(this.state.inputs)) {
      if (key.startsWith(nodeId + ".")) delete this.state.inputs[key];
    }
    this.notify();
  }

  bindInput(nodeId: string, port: string, ref: string): void {
    this.state.inputs[`${nodeId}.${port}`] = ref;
    this.notify();
  }

  /** Mechanical, insertion-stable topological order of the visual graph.
   * Pure graph bookkeeping; every semantic check stays on the server. */
  orderedNodes(extraEdge?: PipelineEdge): CanvasNode[] {
    const nodes = [...this.state.nodes];
    const edges = extraEdge ? [...this.state.edges, extraEdge] : this.state.edges;
    const remaining = new Map(nodes.map((n) => [n.nodeId, n]));
    const blocked = (id: string) =>
      edges.some((e) => e.to === id && remaining.has(e.from));
    const order: CanvasNode[] = [];
    while (remaining.size > 0) {
      const ready = nodes.filter((n) => remaining.has(n.nodeId) && !blocked(n.nodeId));
      if (ready.length === 0) {
        // cyclic candidate graph: fall back to insertion order and let the
        // server report the cycle
        order.push(...remaining.values());
        break;
      }
      order.push(ready[0]);
      remaining.delete(ready[0].nodeId);
    }
    return order;
  }

  workingSpec(extraEdge?: PipelineEdge): PipelineDoc {
    const edges = extraEdge ? [...this.state.edges, extraEdge] : [...this.state.edges];
    return {
      nodes: this.orderedNodes(extraEdge).map((n) => ({
        id: n.nodeId,
        service: n.serviceId,
      })),
      edges,
      inputs: { ...this.state.inputs },
    };
  }

  async refreshValidation(): Promise<ValidateResult> {
    const result = await this.client.validatePipeline(this.workingSpec());
    this.state.validation = result;
    this.notify();
    return result;
  }

  /** Server-authoritative edge drop: accept the edge exactly when the
   * validated working spec gains no new violation by adding it. */
  async tryAddEdge(edge: PipelineEdge): Promise<EdgeVerdict> {
    const [before, after] = await Promise.all([
      this.client.validatePipeline(this.workingSpec()),
      this.client.validatePipeline(this.workingSpec(edge)),
    ]);
    const seen = new Map<string, number>();
    for (const violation of before.violations) {
      const key = violationKey(violation);
      seen.set(key, (seen.get(key) ?? 0) + 1);
    }
    const fresh = after.violations.filter((violation) => {
      const key = violationKey(violation);
      const count = seen.get(key) ?? 0;
      if (count > 0) {
        seen.set(key, count - 1);
        return false;
      }
      return true;
    });
    let verdict: EdgeVerdict;
    if (fresh.length === 0) {
      this.state.edges.push(edge);
      // assimilate insertion order to the data order the edge implies
      this.state.nodes = this.orderedNodes();
      this.state.validation = after;
      verdict = { edge, accepted: true };
    } else {
      this.state.validation = before;
      verdict = {
        edge,
        accepted: false,
        code: fresh[0].code,
        message: fresh[0].message,
      };
    }
    this.state.lastVerdict = verdict;
    this.notify();
    return verdict;
  }

  removeEdge(edge: PipelineEdge): void {
    this.state.edges = this.state.edges.filter(
      (e) =>
        !(e.from === edge.from && e.from_port === edge.from_port &&
          e.to === edge.to && e.to_port === edge.to_port),
    );
    this.notify();
  }

  /** Fill the canvas from a server-synthesized pipeline. */
  async synthesizeFromCapabilities(body: {
    capabilities: string[];
    align_faces?: boolean;
    inputs?: Record<string, string>;
    services?: Record<string, string>;
  }): Promise<PipelineDoc> {
    const doc = await this.client.synthesize(body);
    this.state.nodes = doc.nodes.map((n, i) => ({
      nodeId: n.id,
      serviceId: n.service,
      x: 60 + i * 220,
      y: 80,
    }));
    this.state.edges = [...doc.edges];
    this.state.inputs = { ...doc.inputs };
    this.state.lastVerdict = null;
    await this.refreshValidation();
    return doc;
  }

  get runnable(): boolean {
    return this.state.nodes.length > 0 && this.state.validation?.valid === true;
  }

  // -- runs -----------------------------------------------------------------

  async launchRun(maxParallel = 1): Promise<string> {
    const validation = await this.refreshValidation();
    if (!validation.valid || this.state.nodes.length === 0) {
      throw new Error("pipeline is not runnable");
    }
    const runId = await this.client.startRun(this.workingSpec(), maxParallel);
    await this.attachRun(runId);
    return runId;
  }

  /** Subscribe to an existing run (also the page-reload reconstruction
   * path): seed the view from run status, then replay the event stream. */
  async attachRun(runId: string): Promise<void> {
    this.detachRun();
    const record = await this.client.runStatus(runId);
    this.state.run = {
      runId,
      status: record.status,
      badges: Object.fromEntries(
        record.node_order.map((n) => [n, record.nodes[n].status]),
      ),
      nodeOrder: [...record.node_order],
      artifacts: collectArtifacts(record),
      errors: collectErrors(record),
      eventLog: [],
      transport: "stream",
    };
    this.notify();
    this.openStream(runId);
  }

  detachRun(): void {
    this.subscription?.close();
    this.subscription = null;
    if (this.pollTimer !== null) clearTimeout(this.pollTimer);
    this.pollTimer = null;
  }

  private openStream(runId: string): void {
    const subscription = subscribeEvents(this.client.eventsUrl(runId), (event) =>
      this.applyEvent(runId, event),
    );
    this.subscription = subscription;
    void subscription.done.then((outcome) => {
      if (this.subscription !== subscription) return;
      this.subscription = null;
      if (outcome === "dropped" && this.state.run?.runId === runId) {
        this.state.run.transport = "polling";
        this.notify();
        this.schedulePoll(runId);
      }
    });
  }

  private schedulePoll(runId: string): void {
    this.pollTimer = setTimeout(async () => {
      this.pollTimer = null;
      if (this.state.run?.runId !== runId) return;
      try {
        const record = await this.client.runStatus(runId);
        this.applyRecord(record);
      } catch {
        /* gateway hiccup: keep polling */
      }
      if (this.state.run?.runId === runId && this.state.run.status === "running") {
        this.schedulePoll(runId);
      }
    }, POLL_INTERVAL_MS);
  }

  private applyEvent(runId: string, event: RunEventDoc): void {
    const run = this.state.run;
    if (!run || run.runId !== runId) return;
    run.eventLog.push(event);
    if (event.event === "node_started" && event.node) {
      run.badges[event.node] = "running";
    } else if (event.event === "node_finished" && event.node) {
      run.badges[event.node] = (event.status as NodeStatus) ?? "succeeded";
      if (event.artifact_refs) run.artifacts[event.node] = event.artifact_refs;
      if (event.error) run.errors[event.node] = event.error;
    } else if (event.event === "run_finished") {
      run.status = (event.status as RunView["status"]) ?? "succeeded";
    }
    this.notify();
  }

  private applyRecord(record: RunRecordDoc): void {
    const run = this.state.run;
    if (!run || run.runId !== record.run_id) return;
    run.status = record.status;
    for (const node of record.node_order) {
      run.badges[node] = record.nodes[node].status;
    }
    run.artifacts = collectArtifacts(record);
    run.errors = collectErrors(record);
    this.notify();
  }

  async cancelRun(): Promise<void> {
    const run = this.state.run;
    if (!run) return;
    const record = await this.client.cancelRun(run.runId);
    this.applyRecord(record);
  }
}

function violationKey(violation: Violation): string {
  return JSON.stringify([violation.code, violation.node ?? null, violation.edge ?? null]);
}

function collectArtifacts(record: RunRecordDoc): Record<string, Record<string, string>> {
  const artifacts: Record<string, Record<string, string>> = {};
  for (const [node, state] of Object.entries(record.nodes)) {
    if (state.artifact_refs) artifacts[node] = state.artifact_refs;
  }
  return artifacts;
}

function collectErrors(record: RunRecordDoc): Record<string, string> {
  const errors: Record<string, string> = {};
  for (const [node, state] of Object.entries(record.nodes)) {
    if (state.error) errors[node] = state.error;
  }
  return errors;
}
