// Dashboard wiring: one session drives all four views, and every data need
// goes through the typed API client.

import { ApiClient } from './api';
import { ImageStrip } from './image-strip';
import { LineChart, topicColor } from './line-chart';
import { StateStore } from './state';
import { TrajectoryView } from './trajectory-view';
import { TranscriptView } from './transcript-view';
import type { SessionSummary, TopicList, TopicTriple } from './types';

export class Dashboard {
  readonly state = new StateStore();
  private lineChart: LineChart;
  private trajectoryView: TrajectoryView;
  private transcriptView: TranscriptView;
  private imageStrip: ImageStrip;
  private sessionSelect: HTMLSelectElement;
  private tripleSelects: HTMLSelectElement[] = [];
  private legend: HTMLDivElement;
  private statusBar: HTMLDivElement;
  private sessions: SessionSummary[] = [];
  private topicList: TopicList | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {
    this.root.innerHTML = `
      <header>
        <h1>topicview</h1>
        <label>session <select id="session-select"></select></label>
        <span id="status-bar"></span>
      </header>
      <main>
        <section id="image-panel" class="panel">
          <h2>visual timeline</h2>
          <div id="image-strip"></div>
        </section>
        <section id="chart-panel" class="panel">
          <h2>topic tendency over turns</h2>
          <div id="legend"></div>
          <div id="line-chart"></div>
        </section>
        <section id="trajectory-panel" class="panel">
          <h2>3d trajectory</h2>
          <div id="triple-picker"></div>
          <div id="trajectory"></div>
        </section>
        <section id="transcript-panel" class="panel">
          <h2>transcript</h2>
          <div id="transcript"></div>
        </section>
      </main>`;

    this.sessionSelect = this.root.querySelector('#session-select')!;
    this.statusBar = this.root.querySelector('#status-bar')!;
    this.legend = this.root.querySelector('#legend')!;

    this.lineChart = new LineChart(this.root.querySelector('#line-chart')!, (lo, hi) =>
      this.state.setHighlight(lo, hi),
    );
    this.trajectoryView = new TrajectoryView(this.root.querySelector('#trajectory')!);
    this.transcriptView = new TranscriptView(this.root.querySelector('#transcript')!, () =>
      this.state.clearHighlight(),
    );
    this.imageStrip = new ImageStrip(
      this.root.querySelector('#image-strip')!,
      () => void this.regenerateImages(),
      (charStart) => this.transcriptView.scrollToOffset(charStart),
    );

    this.sessionSelect.addEventListener('change', () => {
      void this.loadSession(this.sessionSelect.value);
    });

    this.state.subscribe((state, changed) => {
      if (changed === 'highlightedRange') void this.onHighlightChange();
      if (changed === 'topicTriple') void this.refreshTrajectory();
      if (changed === 'visibleTopics') this.lineChart.setVisible(state.visibleTopics);
    });
  }

  async start(): Promise<void> {
    const [sessions, topics] = await Promise.all([
      this.api.listSessions(),
      this.api.listTopics(),
    ]);
    if (!sessions || !topics) return;
    this.sessions = sessions.sessions;
    this.topicList = topics;
    this.sessionSelect.replaceChildren(
      ...this.sessions.map((s) => {
        const option = document.createElement('option');
        option.value = s.session_id;
        option.textContent = `${s.session_id} (${s.turn_count} turns)`;
        return option;
      }),
    );
    if (this.sessions.length > 0) {
      await this.loadSession(this.sessions[0].session_id);
    }
  }

  async loadSession(sessionId: string): Promise<void> {
    const summary = this.sessions.find((s) => s.session_id === sessionId);
    if (!summary || !this.topicList) return;
    this.state.selectSession(sessionId, summary.turn_count, this.topicList.topic_count);
    this.sessionSelect.value = sessionId;
    for (const panel of this.root.querySelectorAll<HTMLElement>('.panel')) {
      panel.dataset.sessionId = sessionId;
    }
    this.renderTriplePicker();
    this.renderLegend();

    const [scores, transcript, images] = await Promise.all([
      this.api.getScores(sessionId),
      this.api.getTranscript(sessionId),
      this.api.getImages(sessionId),
      this.refreshTrajectory(),
    ]);
    if (scores) this.lineChart.setData(scores, this.state.current.visibleTopics);
    if (transcript) this.transcriptView.setFullTranscript(transcript);
    if (images) this.imageStrip.setOutcomes(images.outcomes);
    this.status(`${sessionId}: ${summary.turn_count} turns`);
  }

  private async onHighlightChange(): Promise<void> {
    const { selectedSession, highlightedRange } = this.state.current;
    if (!selectedSession) return;
    this.lineChart.setHighlight(highlightedRange);
    if (!highlightedRange) {
      this.transcriptView.showFull();
      return;
    }
    const slice = await this.api.getTranscript(selectedSession, highlightedRange);
    if (slice) this.transcriptView.showSlice(slice, highlightedRange);
  }

  private async refreshTrajectory(): Promise<void> {
    const { selectedSession, topicTriple } = this.state.current;
    if (!selectedSession) return;
    const trajectory = await this.api.getTrajectory(selectedSession, topicTriple);
    if (trajectory) this.trajectoryView.setData(trajectory);
  }

  private async regenerateImages(): Promise<void> {
    const { selectedSession } = this.state.current;
    if (!selectedSession) return;
    this.status('generating images...');
    try {
      const outcomes = await this.api.regenerateImages(selectedSession);
      if (outcomes) this.imageStrip.setOutcomes(outcomes.outcomes);
      this.status('image set replaced');
    } catch (err) {
      this.status(`image generation failed: ${(err as Error).message}`);
    }
  }

  private renderLegend(): void {
    this.legend.replaceChildren();
    const { topicCount, visibleTopics } = this.state.current;
    for (let k = 0; k < topicCount; k++) {
      const label = document.createElement('label');
      label.className = 'legend-entry';
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.checked = visibleTopics[k];
      box.dataset.topic = String(k);
      box.addEventListener('change', () => this.state.toggleTopic(k));
      const swatch = document.createElement('span');
      swatch.className = 'swatch';
      swatch.style.background = topicColor(k);
      const words = this.topicList?.topics[k]?.words.slice(0, 3) ?? [];
      label.title = words.map((w) => w.word).join(' ');
      label.append(box, swatch, document.createTextNode(`t${k}`));
      this.legend.appendChild(label);
    }
  }

  private renderTriplePicker(): void {
    const picker = this.root.querySelector('#triple-picker')!;
    picker.replaceChildren();
    this.tripleSelects = [];
    const { topicCount, topicTriple } = this.state.current;
    (['x', 'y', 'z'] as const).forEach((axis, slot) => {
      const label = document.createElement('label');
      label.textContent = axis + ' ';
      const select = document.createElement('select');
      select.dataset.axis = axis;
      for (let k = 0; k < topicCount; k++) {
        const option = document.createElement('option');
        option.value = String(k);
        option.textContent = `topic ${k}`;
        select.appendChild(option);
      }
      select.value = String(topicTriple[slot]);
      select.addEventListener('change', () => this.applyTriple());
      label.appendChild(select);
      picker.appendChild(label);
      this.tripleSelects.push(select);
    });
  }

  /** Duplicate selections are rejected here, before any request is issued. */
  private applyTriple(): void {
    const triple = this.tripleSelects.map((s) => Number(s.value)) as TopicTriple;
    if (!this.state.setTriple(triple)) {
      this.status('topic axes must be three distinct topics');
      const current = this.state.current.topicTriple;
      this.tripleSelects.forEach((s, i) => (s.value = String(current[i])));
    }
  }

  private status(message: string): void {
    this.statusBar.textContent = message;
  }
}

export function mount(root: HTMLElement, base = ''): Dashboard {
  const dashboard = new Dashboard(root, new ApiClient(base));
  void dashboard.start();
  return dashboard;
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  mount(document.getElementById('app')!);
}
