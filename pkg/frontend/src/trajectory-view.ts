// Rotatable 3D polyline of three topic scores over turn order, rendered as
// SVG after a yaw/pitch rotation and orthographic projection. Points brighten
// with turn order; hovering a vertex reveals its turn index.

import type { Trajectory } from './types';

const SVG_NS = 'http://www.w3.org/2000/svg';

export class TrajectoryView {
  private svg: SVGSVGElement;
  private tooltip: HTMLDivElement;
  private data: Trajectory | null = null;
  private yaw = 0.7;
  private pitch = 0.45;
  private dragging: { x: number; y: number } | null = null;
  private size = 260;

  constructor(private container: HTMLElement) {
    this.svg = document.createElementNS(SVG_NS, 'svg');
    this.svg.setAttribute('viewBox', `0 0 ${this.size} ${this.size}`);
    this.svg.classList.add('trajectory');
    this.container.appendChild(this.svg);
    this.tooltip = document.createElement('div');
    this.tooltip.className = 'trajectory-tooltip hidden';
    this.container.appendChild(this.tooltip);

    this.svg.addEventListener('mousedown', (e) => {
      this.dragging = { x: e.clientX, y: e.clientY };
    });
    window.addEventListener('mousemove', (e) => this.drag(e));
    window.addEventListener('mouseup', () => {
      this.dragging = null;
    });
  }

  setData(data: Trajectory): void {
    this.data = data;
    this.render();
  }

  private drag(e: MouseEvent): void {
    if (!this.dragging) return;
    this.yaw += (e.clientX - this.dragging.x) * 0.01;
    this.pitch += (e.clientY - this.dragging.y) * 0.01;
    this.pitch = Math.max(-1.5, Math.min(1.5, this.pitch));
    this.dragging = { x: e.clientX, y: e.clientY };
    this.render();
  }

  /** Rotate a score triple (each in [-1, 1]) and project onto the view plane. */
  private project(x: number, y: number, z: number): { px: number; py: number; depth: number } {
    const cy = Math.cos(this.yaw);
    const sy = Math.sin(this.yaw);
    const cp = Math.cos(this.pitch);
    const sp = Math.sin(this.pitch);
    const rx = cy * x + sy * z;
    const rz = -sy * x + cy * z;
    const ry = cp * y - sp * rz;
    const depth = sp * y + cp * rz;
    const half = this.size / 2;
    const scale = this.size * 0.28;
    return { px: half + rx * scale, py: half - ry * scale, depth };
  }

  private render(): void {
    this.svg.replaceChildren();
    if (!this.data) return;
    const points = this.data.points.map((p) => ({
      turn: p.turn_index,
      ...this.project(p.x, p.y, p.z),
    }));

    // axes from the origin, one per selected topic
    const axes: Array<[number, number, number, string]> = [
      [1, 0, 0, `t${this.data.topics[0]}`],
      [0, 1, 0, `t${this.data.topics[1]}`],
      [0, 0, 1, `t${this.data.topics[2]}`],
    ];
    const origin = this.project(0, 0, 0);
    for (const [x, y, z, label] of axes) {
      const end = this.project(x, y, z);
      const axis = document.createElementNS(SVG_NS, 'line');
      axis.classList.add('axis-line');
      axis.setAttribute('x1', String(origin.px));
      axis.setAttribute('y1', String(origin.py));
      axis.setAttribute('x2', String(end.px));
      axis.setAttribute('y2', String(end.py));
      this.svg.appendChild(axis);
      const text = document.createElementNS(SVG_NS, 'text');
      text.classList.add('axis-label');
      text.setAttribute('x', String(end.px));
      text.setAttribute('y', String(end.py));
      text.textContent = label;
      this.svg.appendChild(text);
    }

    const path = document.createElementNS(SVG_NS, 'path');
    path.classList.add('trajectory-line');
    path.setAttribute(
      'd',
      points.map((p, i) => `${i === 0 ? 'M' : 'L'}${p.px.toFixed(1)},${p.py.toFixed(1)}`).join(' '),
    );
    this.svg.appendChild(path);

    points.forEach((p, i) => {
      const dot = document.createElementNS(SVG_NS, 'circle');
      dot.classList.add('trajectory-point');
      dot.dataset.turn = String(p.turn);
      dot.setAttribute('cx', String(p.px));
      dot.setAttribute('cy', String(p.py));
      dot.setAttribute('r', '3');
      const shade = points.length > 1 ? i / (points.length - 1) : 1;
      dot.setAttribute('fill-opacity', String(0.35 + 0.65 * shade));
      dot.addEventListener('mouseenter', () => {
        this.tooltip.textContent = `turn ${p.turn}`;
        this.tooltip.classList.remove('hidden');
      });
      dot.addEventListener('mouseleave', () => this.tooltip.classList.add('hidden'));
      this.svg.appendChild(dot);
    });
  }
}
