import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { pollRun } from "../src/poll.js";
import type { RunRecord } from "../src/types.js";

function fakeApi(statuses: (string | undefined)[]): ApiClient {
  let call = 0;
  return {
    getRun: async (runId: string): Promise<RunRecord> => {
      const status = statuses[Math.min(call++, statuses.length - 1)];
      return { run_id: runId, status } as RunRecord;
    },
  } as unknown as ApiClient;
}

describe("pollRun", () => {
  it("resolves immediately when the run is already complete", async () => {
    const waits: number[] = [];
    const record = await pollRun(fakeApi(["complete"]), "r1", {
      sleep: async (ms) => void waits.push(ms),
    });
    expect(record.run_id).toBe("r1");
    expect(waits).toEqual([]);
  });

  it("backs off multiplicatively up to the cap", async () => {
    const waits: number[] = [];
    await pollRun(fakeApi(["pending", "pending", "pending", "complete"]), "r2", {
      intervalMs: 1000,
      backoff: 2,
      maxIntervalMs: 3000,
      sleep: async (ms) => void waits.push(ms),
    });
    expect(waits).toEqual([1000, 2000, 3000]);
  });

  it("times out after the budget", async () => {
    await expect(
      pollRun(fakeApi(["pending"]), "r3", {
        intervalMs: 1000,
        timeoutMs: 2500,
        sleep: async () => {},
      }),
    ).rejects.toThrow(/still pending/);
  });
});
