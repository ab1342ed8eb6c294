// Wire types mirroring the gateway's JSON documents.

export interface PortDoc {
  port: string;
  type: string;
  required?: boolean;
}

export interface ServiceDescriptor {
  service_id: string;
  capability: string;
  version: string;
  inputs: PortDoc[];
  outputs: PortDoc[];
  backend: { kind: string; [key: string]: unknown };
}

export interface PipelineNode {
  id: string;
  service: string;
}

export interface PipelineEdge {
  from: string;
  from_port: string;
  to: string;
  to_port: string;
}

export interface PipelineDoc {
  nodes: PipelineNode[];
  edges: PipelineEdge[];
  inputs: Record<string, string>;
  spec_hash?: string;
}

export interface Violation {
  code: string;
  message: string;
  node?: string;
  edge?: PipelineEdge;
}

export interface ValidateResult {
  valid: boolean;
  violations: Violation[];
}

export type NodeStatus = "pending" | "running" | "succeeded" | "failed" | "skipped";

export interface NodeStateDoc {
  status: NodeStatus;
  artifact_refs?: Record<string, string>;
  error?: string;
  error_code?: string;
  skip_reason?: string;
}

export interface RunRecordDoc {
  run_id: string;
  spec_hash: string;
  status: "running" | "succeeded" | "failed" | "cancelled";
  node_order: string[];
  nodes: Record<string, NodeStateDoc>;
}

export interface RunEventDoc {
  seq: number;
  event: "run_started" | "node_started" | "node_finished" | "run_finished";
  node?: string;
  status?: string;
  artifact_refs?: Record<string, string>;
  error?: string;
  error_code?: string;
  skip_reason?: string;
  run_id?: string;
}

export interface ApiErrorDoc {
  error: { code: string; message: string; details?: unknown };
}
