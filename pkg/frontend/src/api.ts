/** Typed client for the labeling service endpoints. */

export interface NextItem {
  message_id: string;
  text: string;
}

export interface SubmitResult {
  accepted: boolean;
  agent_prediction_was: boolean | null;
  running_agreement: number | null;
}

export interface AgentState {
  n_responses: number;
  agreement_rate: number | null;
  per_category_filter_rate: Record<string, number>;
  warmed_up: boolean;
}

export interface ResponseBody {
  message_id: string;
  intensity: number;
  filter: boolean;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    return typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail ?? body);
  } catch {
    return response.statusText;
  }
}

export class Api {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  /** Next unanswered item, or null when the session queue is exhausted. */
  async nextItem(user: string): Promise<NextItem | null> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/session/${encodeURIComponent(user)}/next`,
    );
    if (response.status === 404) {
      return null;
    }
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as NextItem;
  }

  async submitResponse(user: string, body: ResponseBody): Promise<SubmitResult> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/session/${encodeURIComponent(user)}/response`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as SubmitResult;
  }

  async agentState(user: string): Promise<AgentState> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/session/${encodeURIComponent(user)}/agent`,
    );
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return (await response.json()) as AgentState;
  }
}
