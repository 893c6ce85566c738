/** Thin typed client over the scase evaluation service.
 *
 * The transport is injected so tests can intercept every request and assert
 * that all displayed numbers came over the wire.  Raw response text is kept
 * alongside the parsed document: reset semantics are defined byte-wise.
 */

import type {
  CaseDocument,
  ChallengesDocument,
  EstimateDocument,
  EvaluationRequest,
  InvalidateResponse,
  MatrixDocument,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface RawResponse<T> {
  text: string;
  body: T;
}

async function parseError(response: Response): Promise<ServiceError> {
  let code = "HTTP_" + response.status;
  let message = response.statusText || "request failed";
  try {
    const body = (await response.json()) as { findings?: { code?: string; message?: string }[] };
    const finding = body.findings?.[0];
    if (finding) {
      code = finding.code ?? code;
      message = finding.message ?? message;
    }
  } catch {
    // keep the generic message for non-JSON bodies
  }
  return new ServiceError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<RawResponse<T>> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) throw await parseError(response);
    const text = await response.text();
    return { text, body: JSON.parse(text) as T };
  }

  private async post<T>(path: string, payload: unknown): Promise<RawResponse<T>> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) throw await parseError(response);
    const text = await response.text();
    return { text, body: JSON.parse(text) as T };
  }

  getCase(): Promise<RawResponse<CaseDocument>> {
    return this.get("/api/case");
  }

  getMatrix(): Promise<RawResponse<MatrixDocument>> {
    return this.get("/api/matrix");
  }

  getChallenges(): Promise<RawResponse<ChallengesDocument>> {
    return this.get("/api/challenges");
  }

  evaluate(request: EvaluationRequest): Promise<RawResponse<EstimateDocument>> {
    return this.post("/api/evaluate", request);
  }

  invalidate(node: string, revert = false): Promise<RawResponse<InvalidateResponse>> {
    return this.post("/api/invalidate", revert ? { node, revert } : { node });
  }

  reset(): Promise<RawResponse<{ invalidated: string[] }>> {
    return this.post("/api/reset", {});
  }
}
