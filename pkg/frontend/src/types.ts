// Payload shapes of the analytics service API.

export interface SessionSummary {
  session_id: string;
  turn_count: number;
  condition_tag: string | null;
}

export interface SessionList {
  sessions: SessionSummary[];
}

export interface ScoreRow {
  turn_index: number;
  speaker: 'patient' | 'therapist';
  scores: number[];
}

export interface ScoreSeries {
  session_id: string;
  topic_count: number;
  turn_count: number;
  rows: ScoreRow[];
}

export interface TrajectoryPoint {
  turn_index: number;
  x: number;
  y: number;
  z: number;
}

export interface Trajectory {
  session_id: string;
  topics: number[];
  points: TrajectoryPoint[];
}

export interface TranscriptTurn {
  turn_index: number;
  speaker: 'patient' | 'therapist';
  text: string;
  timestamp: number | null;
  char_start: number;
}

export interface Transcript {
  session_id: string;
  turn_count: number;
  turns: TranscriptTurn[];
}

export interface TopicWord {
  word: string;
  weight: number;
}

export interface TopicEntry {
  index: number;
  words: TopicWord[];
}

export interface TopicList {
  topic_count: number;
  topics: TopicEntry[];
}

export type OutcomeStatus = 'generated' | 'rejected_safety' | 'failed';

export interface ImageOutcome {
  ordinal: number;
  status: OutcomeStatus;
  image_url: string | null;
  detail: string;
  char_start: number;
  char_end: number;
}

export interface ImageOutcomeSet {
  session_id: string;
  outcomes: ImageOutcome[];
}

export type TopicTriple = [number, number, number];
