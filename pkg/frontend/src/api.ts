import type {
  CandidateListing,
  CandidateView,
  CorrespondenceListing,
  Decision,
  RunSummary,
  ServiceError,
} from "./types.js";

/** Error carrying the service's machine-readable code (e.g. "conflict"). */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, error: ServiceError) {
    super(error.message);
    this.code = error.code;
    this.status = status;
  }
}

/** Network-level failure, retryable; distinct from a service-reported error. */
export class TransportFailure extends Error {}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (cause) {
    throw new TransportFailure(`cannot reach ${url}: ${String(cause)}`);
  }
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const error: ServiceError = body?.error ?? {
      code: "error",
      message: `HTTP ${response.status}`,
    };
    throw new ApiError(response.status, error);
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  getRun(runId: string): Promise<RunSummary> {
    return request(`${this.baseUrl}/runs/${runId}`);
  }

  listCandidates(runId: string): Promise<CandidateListing> {
    return request(`${this.baseUrl}/runs/${runId}/table-candidates`);
  }

  submitDecision(runId: string, candidateId: string, decision: Decision): Promise<CandidateView> {
    return request(
      `${this.baseUrl}/runs/${runId}/table-candidates/${candidateId}/decision`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ decision }),
      },
    );
  }

  advance(runId: string): Promise<{ run_id: string; phase: string }> {
    return request(`${this.baseUrl}/runs/${runId}/advance`, { method: "POST" });
  }

  listCorrespondences(runId: string): Promise<CorrespondenceListing> {
    return request(`${this.baseUrl}/runs/${runId}/correspondences`);
  }
}
