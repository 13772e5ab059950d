"""Request pacing for the NCBI endpoints.

Grants are evenly spaced at 1/rate seconds and handed out FIFO; callers
block until their slot, so bursts queue and nothing is ever dropped.
Keyless clients get 3 requests/second, keyed clients 10 (NCBI policy).
The clock and sleep functions are injectable for simulation.
"""

from __future__ import annotations

import threading
import time

KEYLESS_RPS = 3.0
KEYED_RPS = 10.0


class RateLimiter:
    def __init__(self, rate_per_second: float, clock=time.monotonic, sleep=time.sleep):
        if rate_per_second <= 0:
            raise ValueError("rate must be positive")
        self.interval = 1.0 / rate_per_second
        self.rate = rate_per_second
        self._clock = clock
        self._sleep = sleep
        self._next_free: float | None = None
        self._lock = threading.Lock()

    @classmethod
    def for_credentials(cls, credentials, clock=time.monotonic, sleep=time.sleep):
        rate = KEYED_RPS if getattr(credentials, "api_key", None) else KEYLESS_RPS
        return cls(rate, clock=clock, sleep=sleep)

    def acquire(self) -> float:
        """Block until a slot is granted; returns the wait that was
        imposed (0.0 for an immediate grant)."""
        with self._lock:
            now = self._clock()
            if self._next_free is None or now >= self._next_free:
                grant = now
            else:
                grant = self._next_free
            self._next_free = grant + self.interval
            wait = grant - now
        if wait > 0:
            self._sleep(wait)
        return wait
