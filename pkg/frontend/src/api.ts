import {
  Bundle,
  MutationOp,
  ReferencesResponse,
  SortKey,
  SpectrogramResponse,
  StatsResponse,
} from './types.js';

export interface ApiResponse {
  status: number;
  body: unknown;
}

/** Minimal request function so tests can substitute a fake server. */
export type Transport = (
  method: string,
  path: string,
  body?: unknown
) => Promise<ApiResponse>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export const httpTransport = (baseUrl: string): Transport => {
  return async (method, path, body) => {
    const response = await fetch(baseUrl + path, {
      method,
      headers: body !== undefined ? { 'Content-Type': 'application/json' } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    return { status: response.status, body: await response.json() };
  };
};

export class ApiClient {
  constructor(private transport: Transport) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const { status, body: payload } = await this.transport(method, path, body);
    if (status >= 400) {
      const detail = (payload as { detail?: string })?.detail ?? `HTTP ${status}`;
      throw new ApiError(status, detail);
    }
    return payload as T;
  }

  stats(sessionId: string): Promise<StatsResponse> {
    return this.call('GET', `/sessions/${sessionId}/stats`);
  }

  spectrogram(sessionId: string): Promise<SpectrogramResponse> {
    return this.call('GET', `/sessions/${sessionId}/spectrogram`);
  }

  bundle(sessionId: string): Promise<Bundle> {
    return this.call('GET', `/sessions/${sessionId}/bundle`);
  }

  references(sessionId: string, sort: SortKey, desc = true): Promise<ReferencesResponse> {
    return this.call('GET', `/sessions/${sessionId}/references?sort=${sort}&desc=${desc}`);
  }

  applyOp(sessionId: string, op: MutationOp): Promise<StatsResponse> {
    return this.call('POST', `/sessions/${sessionId}/ops`, op);
  }

  undo(sessionId: string): Promise<StatsResponse> {
    return this.call('POST', `/sessions/${sessionId}/undo`);
  }
}
