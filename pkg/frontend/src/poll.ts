/** Poll a run until the server reports it complete. 1s cadence with
 * multiplicative backoff, capped; rejects on timeout or API error. */

import type { ApiClient } from "./api.js";
import type { RunRecord } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  backoff?: number;
  maxIntervalMs?: number;
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export async function pollRun(
  api: ApiClient,
  runId: string,
  options: PollOptions = {},
): Promise<RunRecord> {
  const {
    intervalMs = 1000,
    backoff = 1.5,
    maxIntervalMs = 10_000,
    timeoutMs = 120_000,
    sleep = defaultSleep,
  } = options;
  let waited = 0;
  let interval = intervalMs;
  for (;;) {
    const record = await api.getRun(runId);
    if (record.status === "complete") return record;
    if (waited >= timeoutMs) throw new Error(`run ${runId} still pending after ${waited}ms`);
    await sleep(interval);
    waited += interval;
    interval = Math.min(interval * backoff, maxIntervalMs);
  }
}
