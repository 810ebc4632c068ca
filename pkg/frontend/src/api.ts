// Typed client for the dashboard's only data source: the service HTTP API.
// Every GET is keyed by a view name; a monotonically increasing token per
// view discards responses that arrive after a newer request was issued.

import type {
  ImageOutcomeSet,
  ScoreSeries,
  SessionList,
  TopicList,
  TopicTriple,
  Trajectory,
  Transcript,
} from './types';

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

// The full documented surface; the request-interception suite checks that
// nothing outside this list is ever fetched.
export const DOCUMENTED_ENDPOINTS: RegExp[] = [
  /^\/healthz$/,
  /^\/api\/sessions$/,
  /^\/api\/topics$/,
  /^\/api\/sessions\/[^/]+\/scores$/,
  /^\/api\/sessions\/[^/]+\/trajectory\?topics=\d+,\d+,\d+$/,
  /^\/api\/sessions\/[^/]+\/transcript(\?from=\d+&to=\d+)?$/,
  /^\/api\/sessions\/[^/]+\/images$/,
  /^\/media\/.+$/,
];

export class ApiClient {
  private tokens = new Map<string, number>();

  constructor(private base: string = '') {}

  /** Resolves to null when a newer request for the same view superseded this one. */
  private async request<T>(view: string, path: string, init?: RequestInit): Promise<T | null> {
    const token = (this.tokens.get(view) ?? 0) + 1;
    this.tokens.set(view, token);
    const response = await fetch(this.base + path, init);
    if (this.tokens.get(view) !== token) return null;
    if (!response.ok) {
      let code = 'unknown';
      let message = `HTTP ${response.status}`;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the fallback message
      }
      throw new ApiRequestError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  listSessions(): Promise<SessionList | null> {
    return this.request('sessions', '/api/sessions');
  }

  listTopics(): Promise<TopicList | null> {
    return this.request('topics', '/api/topics');
  }

  getScores(sessionId: string): Promise<ScoreSeries | null> {
    return this.request('scores', `/api/sessions/${encodeURIComponent(sessionId)}/scores`);
  }

  getTrajectory(sessionId: string, triple: TopicTriple): Promise<Trajectory | null> {
    const topics = triple.join(',');
    return this.request(
      'trajectory',
      `/api/sessions/${encodeURIComponent(sessionId)}/trajectory?topics=${topics}`,
    );
  }

  getTranscript(sessionId: string, range?: [number, number]): Promise<Transcript | null> {
    const query = range ? `?from=${range[0]}&to=${range[1]}` : '';
    return this.request(
      'transcript',
      `/api/sessions/${encodeURIComponent(sessionId)}/transcript${query}`,
    );
  }

  getImages(sessionId: string): Promise<ImageOutcomeSet | null> {
    return this.request('images', `/api/sessions/${encodeURIComponent(sessionId)}/images`);
  }

  regenerateImages(sessionId: string): Promise<ImageOutcomeSet | null> {
    return this.request('images', `/api/sessions/${encodeURIComponent(sessionId)}/images`, {
      method: 'POST',
    });
  }
}
