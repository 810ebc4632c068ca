// Transcript readout with speaker-colored rows. Shows either the whole
// session or exactly the brushed turn range, and can scroll to the turn
// containing a given character offset of the session text.

import type { Transcript, TranscriptTurn } from './types';

export class TranscriptView {
  private list: HTMLDivElement;
  private rangeNote: HTMLDivElement;
  private fullTurns: TranscriptTurn[] = [];

  constructor(
    private container: HTMLElement,
    onClearRange: () => void,
  ) {
    this.rangeNote = document.createElement('div');
    this.rangeNote.className = 'range-note hidden';
    const clear = document.createElement('button');
    clear.textContent = 'show all';
    clear.addEventListener('click', onClearRange);
    this.rangeNote.appendChild(document.createElement('span'));
    this.rangeNote.appendChild(clear);
    this.container.appendChild(this.rangeNote);

    this.list = document.createElement('div');
    this.list.className = 'turn-list';
    this.container.appendChild(this.list);
  }

  /** The unsliced transcript, kept for offset lookups even while a range shows. */
  setFullTranscript(transcript: Transcript): void {
    this.fullTurns = transcript.turns;
    this.showTurns(transcript.turns, null);
  }

  showSlice(transcript: Transcript, range: [number, number]): void {
    this.showTurns(transcript.turns, range);
  }

  showFull(): void {
    this.showTurns(this.fullTurns, null);
  }

  private showTurns(turns: TranscriptTurn[], range: [number, number] | null): void {
    this.list.replaceChildren();
    if (range) {
      this.rangeNote.classList.remove('hidden');
      this.rangeNote.querySelector('span')!.textContent = `turns ${range[0]}-${range[1]} `;
    } else {
      this.rangeNote.classList.add('hidden');
    }
    for (const turn of turns) {
      const row = document.createElement('div');
      row.className = `turn ${turn.speaker}`;
      row.dataset.turnIndex = String(turn.turn_index);
      const who = document.createElement('span');
      who.className = 'speaker';
      who.textContent = `${turn.turn_index} ${turn.speaker}`;
      const text = document.createElement('span');
      text.className = 'text';
      text.textContent = turn.text;
      row.append(who, text);
      this.list.appendChild(row);
    }
  }

  /** Scroll to the turn whose text spans the given session-text offset. */
  scrollToOffset(charStart: number): void {
    let target = this.fullTurns[0];
    for (const turn of this.fullTurns) {
      if (turn.char_start <= charStart) target = turn;
      else break;
    }
    if (!target) return;
    this.showFull();
    const row = this.list.querySelector<HTMLElement>(
      `[data-turn-index="${target.turn_index}"]`,
    );
    if (row) {
      row.scrollIntoView({ block: 'center' });
      row.classList.add('flash');
    }
  }
}
