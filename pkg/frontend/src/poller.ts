/** Polling loop with backoff.
 *
 * Runs the work function roughly once a second while the monitor answers.
 * When a cycle throws, the next attempt is delayed by period * 2^failures
 * (capped), and the phase callback gets the error so the UI can raise its
 * banner.  A successful cycle resets the backoff.
 */

export type PollPhase =
  | { kind: "ok" }
  | { kind: "error"; message: string; retryInMs: number; failures: number };

export class Poller {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private running = false;
  private inFlight = false;
  private failures = 0;

  constructor(
    private readonly work: () => Promise<void>,
    private readonly onPhase: (phase: PollPhase) => void,
    readonly periodMs = 1000,
    readonly maxBackoffMs = 8000,
  ) {}

  start(): void {
    if (this.running) return;
    this.running = true;
    void this.cycle();
  }

  stop(): void {
    this.running = false;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
  }

  /** Run a cycle right away (after a user action) instead of waiting out
   * the current period. No-op while a cycle is already in flight. */
  kick(): void {
    if (!this.running || this.inFlight) return;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
    void this.cycle();
  }

  private async cycle(): Promise<void> {
    if (!this.running || this.inFlight) return;
    this.inFlight = true;
    let delay = this.periodMs;
    try {
      await this.work();
      this.failures = 0;
      this.onPhase({ kind: "ok" });
    } catch (exc) {
      this.failures += 1;
      delay = Math.min(this.periodMs * 2 ** this.failures, this.maxBackoffMs);
      this.onPhase({
        kind: "error",
        message: exc instanceof Error ? exc.message : String(exc),
        retryInMs: delay,
        failures: this.failures,
      });
    } finally {
      this.inFlight = false;
    }
    if (this.running) {
      this.timer = setTimeout(() => void this.cycle(), delay);
    }
  }
}
