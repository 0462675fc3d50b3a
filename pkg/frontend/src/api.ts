// Typed client for the election server's HTTP+JSON API. The fetch
// implementation is injectable so tests can record or fake the wire, and
// every request is appended to a transcript ("METHOD /path") used to prove
// that display modes and the coercion flow are indistinguishable on the
// wire.

import type { BoardEntry } from "./crypto.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface StatusResponse {
  phase: string;
  has_voted: boolean;
  candidates: [string, string][];
  security_display: string;
  election_id: string;
  group_profile: string;
  election_pk: string;
}

export interface AlphaResponse {
  shares: { teller_id: number; voter_id: string; share: string }[];
  beta: string;
}

export class ApiClient {
  token: string | null = null;
  requestLog: string[] = [];

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    this.requestLog.push(`${method} ${path}`);
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["X-Selene-Token"] = this.token;
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(
        String(data["code"] ?? "Unknown"),
        String(data["message"] ?? resp.statusText),
        resp.status,
      );
    }
    return data;
  }

  async auth(voterId: string, credential: string): Promise<void> {
    const data = (await this.request("POST", "/api/auth", {
      voter_id: voterId,
      credential,
    })) as { token: string };
    this.token = data.token;
  }

  async status(): Promise<StatusResponse> {
    return (await this.request("GET", "/api/status")) as StatusResponse;
  }

  async ballot(encVote: { alpha: string; beta: string }, sig: { commit: string; response: string }): Promise<number> {
    const data = (await this.request("POST", "/api/ballot", {
      enc_vote: encVote,
      sig,
    })) as { board_index: number };
    return data.board_index;
  }

  async board(): Promise<BoardEntry[]> {
    const data = (await this.request("GET", "/api/board")) as { entries: BoardEntry[] };
    return data.entries;
  }

  async alpha(): Promise<AlphaResponse> {
    return (await this.request("GET", "/api/alpha")) as AlphaResponse;
  }
}
