// Visual timeline: one tile per transcript excerpt, in excerpt order.
// Generated outcomes show the thumbnail; safety rejections show a labeled
// placeholder; failures get a retry affordance. Clicking any tile jumps the
// transcript to the excerpt's starting turn.

import type { ImageOutcome } from './types';

export class ImageStrip {
  private strip: HTMLDivElement;
  private actions: HTMLDivElement;

  constructor(
    private container: HTMLElement,
    private onRegenerate: () => void,
    private onTileClick: (charStart: number) => void,
  ) {
    this.actions = document.createElement('div');
    this.actions.className = 'strip-actions';
    this.container.appendChild(this.actions);
    this.strip = document.createElement('div');
    this.strip.className = 'strip-tiles';
    this.container.appendChild(this.strip);
    this.setOutcomes([]);
  }

  setOutcomes(outcomes: ImageOutcome[]): void {
    this.strip.replaceChildren();
    this.actions.replaceChildren();

    if (outcomes.length === 0) {
      const generate = document.createElement('button');
      generate.className = 'generate-cta';
      generate.textContent = 'Generate images';
      generate.addEventListener('click', this.onRegenerate);
      this.actions.appendChild(generate);
      return;
    }

    const regenerate = document.createElement('button');
    regenerate.className = 'regenerate';
    regenerate.textContent = 'Regenerate';
    regenerate.title = 'Requests a fresh image set; results replace the stored one';
    regenerate.addEventListener('click', this.onRegenerate);
    this.actions.appendChild(regenerate);

    for (const outcome of outcomes) {
      const tile = document.createElement('div');
      tile.className = `tile ${outcome.status}`;
      tile.dataset.ordinal = String(outcome.ordinal);
      tile.addEventListener('click', () => this.onTileClick(outcome.char_start));

      if (outcome.status === 'generated' && outcome.image_url) {
        const img = document.createElement('img');
        img.src = outcome.image_url;
        img.alt = `excerpt ${outcome.ordinal}`;
        tile.appendChild(img);
      } else {
        const placeholder = document.createElement('div');
        placeholder.className = 'placeholder';
        placeholder.textContent = outcome.status === 'rejected_safety' ? '⚠' : '✕';
        tile.appendChild(placeholder);
        const badge = document.createElement('span');
        badge.className = 'badge';
        badge.textContent = outcome.status === 'rejected_safety' ? 'safety' : 'failed';
        badge.title = outcome.detail;
        tile.appendChild(badge);
        if (outcome.status === 'failed') {
          const retry = document.createElement('button');
          retry.className = 'retry';
          retry.textContent = 'retry';
          retry.addEventListener('click', (e) => {
            e.stopPropagation();
            this.onRegenerate();
          });
          tile.appendChild(retry);
        }
      }
      const caption = document.createElement('span');
      caption.className = 'caption';
      caption.textContent = `#${outcome.ordinal}`;
      tile.appendChild(caption);
      this.strip.appendChild(tile);
    }
  }
}
