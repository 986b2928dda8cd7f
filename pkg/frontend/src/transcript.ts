// Exactly-once, in-order transcript state.
//
// The server delivers events ordered by id and resumption uses ?from_seq=,
// so the store's job is to make rendering idempotent: duplicates (stream
// reconnects, optimistic appends reconciled by server seq) are dropped, and
// an out-of-order arrival is parked until the gap fills rather than being
// reordered past rendered messages.

import type { MessageDto } from "./types.js";

export type TranscriptListener = (event: MessageDto) => void;

export class TranscriptStore {
  private rendered: MessageDto[] = [];
  private parked = new Map<number, MessageDto>();
  private listeners: TranscriptListener[] = [];

  /** Highest contiguous sequence rendered so far (0 when empty). */
  get lastSeq(): number {
    const last = this.rendered[this.rendered.length - 1];
    return last ? last.id : 0;
  }

  /** Where a (re)subscription should resume from. */
  get resumeFrom(): number {
    return this.lastSeq + 1;
  }

  get events(): readonly MessageDto[] {
    return this.rendered;
  }

  get size(): number {
    return this.rendered.length;
  }

  onEvent(listener: TranscriptListener): void {
    this.listeners.push(listener);
  }

  /** True when every id from 1..lastSeq has been rendered exactly once. */
  get gapFree(): boolean {
    return this.rendered.every((event, index) => event.id === index + 1);
  }

  insert(event: MessageDto): void {
    if (event.id <= this.lastSeq) {
      return; // duplicate of something already rendered
    }
    this.parked.set(event.id, event);
    let next = this.lastSeq + 1;
    while (this.parked.has(next)) {
      const ready = this.parked.get(next)!;
      this.parked.delete(next);
      this.rendered.push(ready);
      for (const listener of this.listeners) {
        listener(ready);
      }
      next += 1;
    }
  }

  insertAll(events: Iterable<MessageDto>): void {
    for (const event of events) {
      this.insert(event);
    }
  }

  clear(): void {
    this.rendered = [];
    this.parked.clear();
  }
}
