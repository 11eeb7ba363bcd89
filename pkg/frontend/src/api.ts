// Typed client for the conversation service. The browser holds no annotation
// or strategy logic; every class label shown in the UI comes from these
// payloads verbatim.

export interface OntologyInfo {
  concept: string;
  classes: string[];
  ordinal: boolean;
}

export interface CatalogResponse {
  ontologies: Record<string, OntologyInfo>;
  strategies: string[];
}

export interface SessionInfo {
  id: string;
  classes: string[];
  state: string | null;
}

export interface TurnResponse {
  detected: string;
  target: string;
  reply: string;
  reply_detected: string;
  compliant: boolean;
}

export interface TranscriptTurn {
  role: "user" | "agent";
  text: string;
  detected: string | null;
  target: string | null;
  compliant: boolean | null;
}

export interface TranscriptResponse {
  id: string;
  ontology: string;
  classes: string[];
  turns: TranscriptTurn[];
}

export type FetchLike = (
  input: string,
  init?: RequestInit
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
    public readonly kind?: string
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseJson(response: Response): Promise<any> {
  if (!response.ok) {
    let message = `HTTP ${response.status}`;
    let kind: string | undefined;
    try {
      const body = await response.json();
      if (body && typeof body.error === "string") message = body.error;
      if (body && typeof body.kind === "string") kind = body.kind;
    } catch {
      // non-JSON error body: keep the status message
    }
    throw new ApiError(message, response.status, kind);
  }
  return response.json();
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init)
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async catalog(): Promise<CatalogResponse> {
    return parseJson(await this.fetchFn(this.url("/ontologies")));
  }

  async createSession(ontology: string, strategy: string): Promise<SessionInfo> {
    return parseJson(
      await this.fetchFn(this.url("/sessions"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ ontology, strategy }),
      })
    );
  }

  async postTurn(sessionId: string, text: string): Promise<TurnResponse> {
    return parseJson(
      await this.fetchFn(this.url(`/sessions/${sessionId}/turns`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text }),
      })
    );
  }

  async transcript(sessionId: string): Promise<TranscriptResponse> {
    return parseJson(await this.fetchFn(this.url(`/sessions/${sessionId}`)));
  }
}
