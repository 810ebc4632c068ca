// Canned API payloads and an intercepting fetch for the test suite.

import { vi } from 'vitest';
import { DOCUMENTED_ENDPOINTS } from '../src/api';
import type {
  ImageOutcomeSet,
  ScoreSeries,
  SessionList,
  TopicList,
  Trajectory,
  Transcript,
} from '../src/types';

export const K = 10;
export const TURNS = 10;

export function sessionList(): SessionList {
  return {
    sessions: [
      { session_id: 's-alpha', turn_count: TURNS, condition_tag: 'anxiety' },
      { session_id: 's-beta', turn_count: 6, condition_tag: null },
    ],
  };
}

export function topicList(): TopicList {
  return {
    topic_count: K,
    topics: Array.from({ length: K }, (_, k) => ({
      index: k,
      words: Array.from({ length: 10 }, (_, i) => ({
        word: `w${k}_${i}`,
        weight: (10 - i) / 100,
      })),
    })),
  };
}

export function scoreSeries(sessionId: string, turns = TURNS): ScoreSeries {
  return {
    session_id: sessionId,
    topic_count: K,
    turn_count: turns,
    rows: Array.from({ length: turns }, (_, i) => ({
      turn_index: i,
      speaker: i % 2 === 0 ? 'patient' : 'therapist',
      scores: Array.from({ length: K }, (_, k) => Math.sin(0.3 * i + k)),
    })),
  };
}

export function trajectory(sessionId: string, topics: number[], turns = TURNS): Trajectory {
  const rows = scoreSeries(sessionId, turns).rows;
  return {
    session_id: sessionId,
    topics,
    points: rows.map((r) => ({
      turn_index: r.turn_index,
      x: r.scores[topics[0]],
      y: r.scores[topics[1]],
      z: r.scores[topics[2]],
    })),
  };
}

// ten turns, each text 20 chars + newline separator in the session text
export function transcript(sessionId: string, range?: [number, number]): Transcript {
  const all = Array.from({ length: TURNS }, (_, i) => ({
    turn_index: i,
    speaker: (i % 2 === 0 ? 'patient' : 'therapist') as 'patient' | 'therapist',
    text: `turn ${String(i).padStart(2, '0')} says hello`,
    timestamp: i * 30,
    char_start: i * 21,
  }));
  const turns = range ? all.slice(range[0], range[1] + 1) : all;
  return { session_id: sessionId, turn_count: TURNS, turns };
}

export function imageOutcomes(sessionId: string): ImageOutcomeSet {
  return {
    session_id: sessionId,
    outcomes: [
      {
        ordinal: 0,
        status: 'generated',
        image_url: `/media/${sessionId}/images/${sessionId}_0.png`,
        detail: '',
        char_start: 0,
        char_end: 80,
      },
      {
        ordinal: 1,
        status: 'rejected_safety',
        image_url: null,
        detail: 'content policy',
        char_start: 80,
        char_end: 150,
      },
      {
        ordinal: 2,
        status: 'failed',
        image_url: null,
        detail: 'timeout',
        char_start: 150,
        char_end: 210,
      },
    ],
  };
}

export interface InterceptedFetch {
  requests: { url: string; method: string }[];
  undocumented: string[];
  fetch: typeof fetch;
}

/** fetch stub that records every request and serves the canned payloads. */
export function interceptFetch(
  overrides: Partial<Record<string, unknown>> = {},
): InterceptedFetch {
  const requests: { url: string; method: string }[] = [];
  const undocumented: string[] = [];

  const stub = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? 'GET';
    requests.push({ url, method });
    if (!DOCUMENTED_ENDPOINTS.some((re) => re.test(url))) {
      undocumented.push(url);
    }
    if (url in overrides) {
      return jsonResponse(overrides[url]);
    }

    const sessionMatch = url.match(/^\/api\/sessions\/([^/?]+)/);
    const sid = sessionMatch ? decodeURIComponent(sessionMatch[1]) : '';
    if (url === '/api/sessions') return jsonResponse(sessionList());
    if (url === '/api/topics') return jsonResponse(topicList());
    if (/\/scores$/.test(url)) {
      return jsonResponse(scoreSeries(sid, sid === 's-beta' ? 6 : TURNS));
    }
    if (url.includes('/trajectory')) {
      const topics = url
        .split('topics=')[1]
        .split(',')
        .map((x) => Number(x));
      return jsonResponse(trajectory(sid, topics, sid === 's-beta' ? 6 : TURNS));
    }
    if (url.includes('/transcript')) {
      const rangeMatch = url.match(/\?from=(\d+)&to=(\d+)$/);
      const range = rangeMatch
        ? ([Number(rangeMatch[1]), Number(rangeMatch[2])] as [number, number])
        : undefined;
      return jsonResponse(transcript(sid, range));
    }
    if (url.includes('/images')) {
      return jsonResponse(method === 'POST' ? imageOutcomes(sid) : { session_id: sid, outcomes: [] });
    }
    return jsonResponse(
      { http_status: 404, code: 'not_found', message: `no fixture for ${url}` },
      404,
    );
  });

  return { requests, undocumented, fetch: stub as unknown as typeof fetch };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}
