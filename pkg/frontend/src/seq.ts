/** Per-channel request sequence tokens. Concurrent in-flight requests
 * are allowed; a response is applied only if no newer request on the
 * same channel was issued after it, so stale responses are discarded. */

export class SequenceTracker {
  private latest = new Map<string, number>();

  /** Claim the next token for a channel (call when issuing a request). */
  issue(channel: string): number {
    const token = (this.latest.get(channel) ?? 0) + 1;
    this.latest.set(channel, token);
    return token;
  }

  /** True iff the given token is still the newest for its channel. */
  isCurrent(channel: string, token: number): boolean {
    return this.latest.get(channel) === token;
  }
}
