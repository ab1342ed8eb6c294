// Thin typed client over the gateway HTTP surface. All engine semantics stay
// server-side; this module only moves documents.

import type {
  ApiErrorDoc,
  PipelineDoc,
  RunRecordDoc,
  ServiceDescriptor,
  ValidateResult,
} from "./types";

export class GatewayError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
    readonly details?: unknown,
  ) {
    super(message);
  }
}

export class GatewayClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: body !== undefined ? { "content-type": "application/json" } : undefined,
        body: body !== undefined ? JSON.stringify(body) : undefined,
      });
    } catch (err) {
      throw new GatewayError("GATEWAY_UNREACHABLE", String(err), 0);
    }
    if (!response.ok) {
      let doc: ApiErrorDoc | undefined;
      try {
        doc = (await response.json()) as ApiErrorDoc;
      } catch {
        /* non-JSON error body */
      }
      throw new GatewayError(
        doc?.error?.code ?? "HTTP_ERROR",
        doc?.error?.message ?? response.statusText,
        response.status,
        doc?.error?.details,
      );
    }
    return (await response.json()) as T;
  }

  listServices(): Promise<ServiceDescriptor[]> {
    return this.request("GET", "/services");
  }

  validatePipeline(pipeline: PipelineDoc): Promise<ValidateResult> {
    return this.request("POST", "/pipelines/validate", { pipeline });
  }

  synthesize(body: {
    capabilities: string[];
    align_faces?: boolean;
    inputs?: Record<string, string>;
    services?: Record<string, string>;
  }): Promise<PipelineDoc> {
    return this.request("POST", "/pipelines/synthesize", body);
  }

  async uploadArtifact(type: string, bytes: Uint8Array): Promise<string> {
    const b64 = toBase64(bytes);
    const doc = await this.request<{ ref: string }>("POST", "/artifacts", { type, b64 });
    return doc.ref;
  }

  async startRun(pipeline: PipelineDoc, maxParallel = 1): Promise<string> {
    const doc = await this.request<{ run_id: string }>("POST", "/runs", {
      pipeline,
      options: { max_parallel: maxParallel },
    });
    return doc.run_id;
  }

  runStatus(runId: string): Promise<RunRecordDoc> {
    return this.request("GET", `/runs/${runId}`);
  }

  cancelRun(runId: string): Promise<RunRecordDoc> {
    return this.request("POST", `/runs/${runId}/cancel`);
  }

  artifactUrl(runId: string, node: string, port: string): string {
    return `${this.baseUrl}/runs/${runId}/artifacts/${node}/${port}`;
  }

  eventsUrl(runId: string, after = 0): string {
    return `${this.baseUrl}/runs/${runId}/events?after=${after}`;
  }
}

export function toBase64(bytes: Uint8Array): string {
  let binary = "";
  for (const b of bytes) binary += String.fromCharCode(b);
  return btoa(binary);
}
