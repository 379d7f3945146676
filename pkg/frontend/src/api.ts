/** Typed client for the /v1 HTTP API; the UI's only channel to the backend. */

import {
  DeductionReport,
  Diagnostic,
  FactView,
  GatewayPatchResult,
  NetworkDoc,
  ProcessGraphView,
  Project,
  SeedEntry,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly diagnostics: Diagnostic[] = [],
  ) {
    super(message);
  }
}

async function raiseFor(response: Response): Promise<never> {
  let code = "error";
  let message = `${response.status} ${response.statusText}`;
  let diagnostics: Diagnostic[] = [];
  try {
    const body = await response.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
      diagnostics = body.error.diagnostics ?? [];
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiRequestError(response.status, code, message, diagnostics);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) await raiseFor(response);
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    return (await this.request(path, init)).json() as Promise<T>;
  }

  createProject(name: string): Promise<Project> {
    return this.json("/v1/projects", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ name }),
    });
  }

  listProjects(): Promise<Project[]> {
    return this.json("/v1/projects");
  }

  getProject(id: string): Promise<Project> {
    return this.json(`/v1/projects/${encodeURIComponent(id)}`);
  }

  saveNetwork(id: string, doc: NetworkDoc): Promise<NetworkDoc> {
    return this.json(`/v1/projects/${encodeURIComponent(id)}/network`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
  }

  getNetwork(id: string): Promise<NetworkDoc> {
    return this.json(`/v1/projects/${encodeURIComponent(id)}/network`);
  }

  deduce(id: string): Promise<DeductionReport> {
    return this.json(`/v1/projects/${encodeURIComponent(id)}/deduce`, { method: "POST" });
  }

  facts(id: string, filter?: { provenance?: string; rule?: string }): Promise<FactView[]> {
    const params = new URLSearchParams();
    if (filter?.provenance) params.set("provenance", filter.provenance);
    if (filter?.rule) params.set("rule", filter.rule);
    const suffix = params.toString() ? `?${params}` : "";
    return this.json(`/v1/projects/${encodeURIComponent(id)}/facts${suffix}`);
  }

  assemble(id: string): Promise<ProcessGraphView> {
    return this.json(`/v1/projects/${encodeURIComponent(id)}/assemble`, { method: "POST" });
  }

  process(id: string): Promise<ProcessGraphView> {
    return this.json(`/v1/projects/${encodeURIComponent(id)}/process`);
  }

  assignGateway(id: string, gatewayId: string, type: string): Promise<GatewayPatchResult> {
    return this.json(
      `/v1/projects/${encodeURIComponent(id)}/gateways/${encodeURIComponent(gatewayId)}`,
      {
        method: "PATCH",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ type }),
      },
    );
  }

  diagnostics(id: string): Promise<Diagnostic[]> {
    return this.json(`/v1/projects/${encodeURIComponent(id)}/diagnostics`);
  }

  async exportBpmn(id: string): Promise<Uint8Array> {
    const response = await this.request(`/v1/projects/${encodeURIComponent(id)}/export`, {
      method: "POST",
    });
    return new Uint8Array(await response.arrayBuffer());
  }

  async downloadBpmn(id: string): Promise<Uint8Array> {
    const response = await this.request(
      `/v1/projects/${encodeURIComponent(id)}/export.bpmn`,
    );
    return new Uint8Array(await response.arrayBuffer());
  }

  seedEntries(q = ""): Promise<SeedEntry[]> {
    const suffix = q ? `?q=${encodeURIComponent(q)}` : "";
    return this.json(`/v1/seed/entries${suffix}`);
  }
}
