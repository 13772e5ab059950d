from ccs.pubmed import NcbiCredentials
from ccs.ratelimit import RateLimiter


def drain(limiter, n):
    waits = [limiter.acquire() for _ in range(n)]
    return waits


class TestRateLimiter:
    def test_single_request_immediate(self, fake_clock):
        limiter = RateLimiter(3.0, clock=fake_clock.clock, sleep=fake_clock.sleep)
        assert limiter.acquire() == 0.0
        assert fake_clock.now == 0.0

    def test_30_requests_keyless_wall_time(self, fake_clock):
        limiter = RateLimiter(3.0, clock=fake_clock.clock, sleep=fake_clock.sleep)
        drain(limiter, 30)
        assert fake_clock.now >= 9.6

    def test_30_requests_keyed_wall_time(self, fake_clock):
        limiter = RateLimiter(10.0, clock=fake_clock.clock, sleep=fake_clock.sleep)
        drain(limiter, 30)
        assert fake_clock.now >= 2.9

    def test_no_request_dropped(self, fake_clock):
        limiter = RateLimiter(5.0, clock=fake_clock.clock, sleep=fake_clock.sleep)
        waits = drain(limiter, 100)
        assert len(waits) == 100  # every acquire eventually granted

    def test_burst_then_idle_resets(self, fake_clock):
        limiter = RateLimiter(2.0, clock=fake_clock.clock, sleep=fake_clock.sleep)
        drain(limiter, 4)
        fake_clock.now += 100.0
        assert limiter.acquire() == 0.0

    def test_rates_follow_credentials(self):
        keyless = RateLimiter.for_credentials(NcbiCredentials("a@b.c"))
        keyed = RateLimiter.for_credentials(NcbiCredentials("a@b.c", api_key="k"))
        assert keyless.rate == 3.0
        assert keyed.rate == 10.0
