/** Typed client for the gateway HTTP API. */

export type ResponseKind = "answer" | "confirm_question" | "fallback";
export type SideName = "front" | "back" | "both";
export type ModeName = "medical_qa" | "social" | "chat";

export interface AgentResponse {
  kind: ResponseKind;
  text: string;
  highlights: string[];
  side_hint: SideName;
  mode_used: ModeName;
  topic: string | null;
}

export interface Region {
  region_id: string;
  phrase: string;
  side: SideName;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export class GatewayError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

async function parseJson(response: Response): Promise<unknown> {
  if (!response.ok) {
    let body: ApiErrorBody = { code: "unknown_error", message: response.statusText };
    try {
      body = (await response.json()) as ApiErrorBody;
    } catch {
      // non-JSON error body: keep the fallback
    }
    throw new GatewayError(body.code, body.message, response.status);
  }
  return response.json();
}

export class GatewayClient {
  constructor(private readonly baseUrl: string = "") {}

  async createSession(): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions`, { method: "POST" });
    const body = (await parseJson(response)) as { session_id: string };
    return body.session_id;
  }

  async fetchRegions(): Promise<Region[]> {
    const response = await fetch(`${this.baseUrl}/avatar/regions`);
    const body = (await parseJson(response)) as { regions: Region[] };
    return body.regions;
  }

  async sendMessage(sessionId: string, text: string): Promise<AgentResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/message`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    return (await parseJson(response)) as AgentResponse;
  }

  async sendConfirm(sessionId: string, affirmed: boolean): Promise<AgentResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/confirm`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ affirmed }),
    });
    return (await parseJson(response)) as AgentResponse;
  }

  async sendPoint(
    sessionId: string,
    regionId: string,
    side: "front" | "back",
  ): Promise<AgentResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/point`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ region_id: regionId, side }),
    });
    return (await parseJson(response)) as AgentResponse;
  }
}
