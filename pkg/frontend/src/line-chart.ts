// Multi-line SVG chart of per-topic scores over turn index, with a
// horizontal brush that selects a turn range.

import type { ScoreSeries } from './types';

const SVG_NS = 'http://www.w3.org/2000/svg';

export const TOPIC_COLORS = [
  '#4e9de6', '#e6704e', '#58c27a', '#c78be6', '#e6c04e',
  '#4ee6d4', '#e64e8a', '#9de64e', '#8a9be6', '#e6944e',
];

export function topicColor(k: number): string {
  return TOPIC_COLORS[k % TOPIC_COLORS.length];
}

interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export class LineChart {
  private svg: SVGSVGElement;
  private series: ScoreSeries | null = null;
  private visible: boolean[] = [];
  private highlight: [number, number] | null = null;
  private width = 520;
  private height = 240;
  private margins: Margins = { top: 10, right: 10, bottom: 22, left: 34 };
  private brushing: { startTurn: number } | null = null;

  constructor(
    private container: HTMLElement,
    private onBrush: (lo: number, hi: number) => void,
  ) {
    this.svg = document.createElementNS(SVG_NS, 'svg');
    this.svg.setAttribute('viewBox', `0 0 ${this.width} ${this.height}`);
    this.svg.classList.add('line-chart');
    this.container.appendChild(this.svg);
    this.svg.addEventListener('mousedown', (e) => this.brushStart(e));
    this.svg.addEventListener('mousemove', (e) => this.brushMove(e));
    window.addEventListener('mouseup', () => this.brushEnd());
  }

  setData(series: ScoreSeries, visible: boolean[]): void {
    this.series = series;
    this.visible = visible;
    this.render();
  }

  setVisible(visible: boolean[]): void {
    this.visible = visible;
    this.render();
  }

  setHighlight(range: [number, number] | null): void {
    this.highlight = range;
    this.render();
  }

  private xOf(turn: number): number {
    const n = Math.max((this.series?.turn_count ?? 1) - 1, 1);
    const inner = this.width - this.margins.left - this.margins.right;
    return this.margins.left + (turn / n) * inner;
  }

  private turnOf(x: number): number {
    const n = Math.max((this.series?.turn_count ?? 1) - 1, 1);
    const inner = this.width - this.margins.left - this.margins.right;
    const t = Math.round(((x - this.margins.left) / inner) * n);
    return Math.max(0, Math.min(t, n));
  }

  private yOf(score: number): number {
    const inner = this.height - this.margins.top - this.margins.bottom;
    return this.margins.top + ((1 - score) / 2) * inner; // score 1 at top, -1 at bottom
  }

  private eventX(e: MouseEvent): number {
    const rect = this.svg.getBoundingClientRect();
    const scale = rect.width > 0 ? this.width / rect.width : 1;
    return (e.clientX - rect.left) * scale;
  }

  private brushStart(e: MouseEvent): void {
    if (!this.series) return;
    this.brushing = { startTurn: this.turnOf(this.eventX(e)) };
  }

  private brushMove(e: MouseEvent): void {
    if (!this.brushing || !this.series) return;
    const current = this.turnOf(this.eventX(e));
    this.highlight = [
      Math.min(this.brushing.startTurn, current),
      Math.max(this.brushing.startTurn, current),
    ];
    this.render();
  }

  private brushEnd(): void {
    if (!this.brushing || !this.highlight) {
      this.brushing = null;
      return;
    }
    this.brushing = null;
    this.onBrush(this.highlight[0], this.highlight[1]);
  }

  private render(): void {
    this.svg.replaceChildren();
    if (!this.series) return;
    const { rows, topic_count } = this.series;

    if (this.highlight) {
      const [lo, hi] = this.highlight;
      const band = document.createElementNS(SVG_NS, 'rect');
      band.classList.add('brush-band');
      band.setAttribute('x', String(this.xOf(lo)));
      band.setAttribute('width', String(Math.max(this.xOf(hi) - this.xOf(lo), 2)));
      band.setAttribute('y', String(this.margins.top));
      band.setAttribute(
        'height',
        String(this.height - this.margins.top - this.margins.bottom),
      );
      this.svg.appendChild(band);
    }

    for (const score of [-1, 0, 1]) {
      const grid = document.createElementNS(SVG_NS, 'line');
      grid.classList.add('grid-line');
      grid.setAttribute('x1', String(this.margins.left));
      grid.setAttribute('x2', String(this.width - this.margins.right));
      grid.setAttribute('y1', String(this.yOf(score)));
      grid.setAttribute('y2', String(this.yOf(score)));
      this.svg.appendChild(grid);
      const label = document.createElementNS(SVG_NS, 'text');
      label.classList.add('axis-label');
      label.setAttribute('x', '4');
      label.setAttribute('y', String(this.yOf(score) + 3));
      label.textContent = score.toFixed(0);
      this.svg.appendChild(label);
    }

    for (let k = 0; k < topic_count; k++) {
      if (!this.visible[k]) continue;
      const path = document.createElementNS(SVG_NS, 'path');
      path.classList.add('topic-line');
      path.dataset.topic = String(k);
      const d = rows
        .map(
          (row, i) =>
            `${i === 0 ? 'M' : 'L'}${this.xOf(row.turn_index).toFixed(1)},` +
            `${this.yOf(row.scores[k]).toFixed(1)}`,
        )
        .join(' ');
      path.setAttribute('d', d);
      path.setAttribute('stroke', topicColor(k));
      this.svg.appendChild(path);
    }

    // x labels: first, middle, last turn
    const marks = [0, Math.floor((rows.length - 1) / 2), rows.length - 1];
    for (const m of new Set(marks)) {
      if (m < 0) continue;
      const label = document.createElementNS(SVG_NS, 'text');
      label.classList.add('axis-label');
      label.setAttribute('x', String(this.xOf(m) - 4));
      label.setAttribute('y', String(this.height - 6));
      label.textContent = String(m);
      this.svg.appendChild(label);
    }
  }
}
