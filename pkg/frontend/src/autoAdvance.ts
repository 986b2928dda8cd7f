// Auto-advance loop: the server only moves when asked, so continuous
// meetings are driven by repeatedly requesting one turn. The loop pauses
// while the human is typing, leaving room to interject before the next turn.

import type { MeetingApi } from "./api.js";
import { COMPLETED_STAGE } from "./types.js";

export interface AutoAdvanceOptions {
  intervalMs?: number;
  onTurn?: (stage: string) => void;
  onError?: (error: unknown) => void;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class AutoAdvancer {
  private running = false;
  private typing = false;
  private loop: Promise<void> | null = null;

  constructor(
    private api: MeetingApi,
    private meetingId: string,
    private options: AutoAdvanceOptions = {},
  ) {}

  get isRunning(): boolean {
    return this.running;
  }

  /** Pause while the chat input is focused; resume on blur/send. */
  setTyping(typing: boolean): void {
    this.typing = typing;
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    this.loop = this.run();
  }

  async stop(): Promise<void> {
    this.running = false;
    await this.loop;
    this.loop = null;
  }

  /** Resolves when the meeting completes or the advancer is stopped. */
  async whenSettled(): Promise<void> {
    await this.loop;
  }

  private async run(): Promise<void> {
    const interval = this.options.intervalMs ?? 600;
    while (this.running) {
      if (this.typing) {
        await sleep(50);
        continue;
      }
      try {
        const result = await this.api.advance(this.meetingId, 1);
        this.options.onTurn?.(result.stage);
        if (result.stage === COMPLETED_STAGE) {
          this.running = false;
          return;
        }
      } catch (error) {
        this.options.onError?.(error);
        this.running = false;
        return;
      }
      await sleep(interval);
    }
  }
}
