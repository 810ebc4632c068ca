// Single source of truth for what the operator is looking at. The guards
// here are what keeps illegal view states (duplicate triple members, ranges
// outside the session) from ever reaching the network layer.

import type { TopicTriple } from './types';

export interface ViewState {
  selectedSession: string | null;
  turnCount: number;
  topicCount: number;
  topicTriple: TopicTriple;
  highlightedRange: [number, number] | null;
  visibleTopics: boolean[];
}

export type StateListener = (state: ViewState, changed: keyof ViewState) => void;

export class StateStore {
  private state: ViewState = {
    selectedSession: null,
    turnCount: 0,
    topicCount: 0,
    topicTriple: [0, 1, 2],
    highlightedRange: null,
    visibleTopics: [],
  };
  private listeners: StateListener[] = [];

  get current(): ViewState {
    return this.state;
  }

  subscribe(listener: StateListener): void {
    this.listeners.push(listener);
  }

  private emit(changed: keyof ViewState): void {
    for (const listener of this.listeners) listener(this.state, changed);
  }

  selectSession(sessionId: string, turnCount: number, topicCount: number): void {
    this.state = {
      ...this.state,
      selectedSession: sessionId,
      turnCount,
      topicCount,
      highlightedRange: null,
      topicTriple: this.state.topicTriple.every((t) => t < topicCount)
        ? this.state.topicTriple
        : [0, 1, 2],
      visibleTopics: Array(topicCount).fill(true),
    };
    this.emit('selectedSession');
  }

  /** Returns false (and changes nothing) for duplicate or out-of-range triples. */
  setTriple(triple: TopicTriple): boolean {
    const [a, b, c] = triple;
    if (new Set(triple).size !== 3) return false;
    if (triple.some((t) => t < 0 || t >= this.state.topicCount)) return false;
    if (a === this.state.topicTriple[0] && b === this.state.topicTriple[1] && c === this.state.topicTriple[2]) {
      return true; // no-op, no refetch
    }
    this.state = { ...this.state, topicTriple: [a, b, c] };
    this.emit('topicTriple');
    return true;
  }

  /** Clamps the brushed range into [0, turnCount). */
  setHighlight(lo: number, hi: number): void {
    if (this.state.turnCount === 0) return;
    const max = this.state.turnCount - 1;
    const from = Math.max(0, Math.min(Math.min(lo, hi), max));
    const to = Math.max(0, Math.min(Math.max(lo, hi), max));
    this.state = { ...this.state, highlightedRange: [from, to] };
    this.emit('highlightedRange');
  }

  clearHighlight(): void {
    if (this.state.highlightedRange === null) return;
    this.state = { ...this.state, highlightedRange: null };
    this.emit('highlightedRange');
  }

  toggleTopic(index: number): void {
    if (index < 0 || index >= this.state.visibleTopics.length) return;
    const visibleTopics = [...this.state.visibleTopics];
    visibleTopics[index] = !visibleTopics[index];
    this.state = { ...this.state, visibleTopics };
    this.emit('visibleTopics');
  }
}
