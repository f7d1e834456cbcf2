"""Deterministic discrete-event engine.

Real time and local clock time are exact rationals (``int`` or
``fractions.Fraction``), so deadlines compare without rounding error.
"""
from __future__ import annotations

import bisect
import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, NamedTuple, Optional, Union

Time = Union[int, Fraction]

DELIVERY = "deliver"
TIMER = "timer"
TICK = "tick"
START = "start"
CALL = "call"


class ConfigError(ValueError):
    """Raised for malformed simulation parameters."""


def norm(x: Time) -> Time:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def as_time(x: Any) -> Time:
    """Coerce user input (int, float, Fraction, "a/b" string) to an exact time."""
    if isinstance(x, bool):
        raise ConfigError(f"not a time value: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return norm(x)
    if isinstance(x, float):
        # repr gives the shortest decimal that round-trips, e.g. 0.1 -> 1/10
        return norm(Fraction(repr(x)))
    if isinstance(x, str):
        try:
            return norm(Fraction(x.strip()))
        except ValueError as exc:
            raise ConfigError(f"not a time value: {x!r}") from exc
    raise ConfigError(f"not a time value: {x!r}")


def fmt_time(t: Optional[Time]) -> Union[int, str, None]:
    """JSON-friendly form: ints stay ints, other rationals become "n/d"."""
    if t is None:
        return None
    t = norm(t)
    if isinstance(t, int):
        return t
    return f"{t.numerator}/{t.denominator}"


class ClockSchedule:
    """Piecewise-linear map from real time to a process's local time.

    ``segments`` lists ``(real_start, rate)`` pairs for the period before
    ``gst``; from ``gst`` on the rate is exactly 1.
    """

    def __init__(self, gst: Time = 0, segments=None, offset: Time = 0):
        gst = as_time(gst)
        segs = sorted((as_time(s), as_time(r)) for s, r in (segments or [(0, 1)]))
        if any(r <= 0 for _, r in segs):
            raise ConfigError("clock rates must be positive")
        if any(s < 0 for s, _ in segs):
            raise ConfigError("clock segments must start at t >= 0")
        segs = [(s, r) for s, r in segs if s < gst]
        if not segs or segs[0][0] != 0:
            segs.insert(0, (0, 1))
        segs.append((gst, 1))
        self.gst = gst
        self._real = []
        self._local = []
        self._rate = []
        local = as_time(offset)
        for i, (start, rate) in enumerate(segs):
            if i:
                prev_start, prev_rate = segs[i - 1]
                local = norm(local + (start - prev_start) * prev_rate)
            if self._real and self._real[-1] == start:
                # zero-length segment (e.g. gst == 0)
                self._local[-1], self._rate[-1] = local, rate
                continue
            self._real.append(start)
            self._local.append(local)
            self._rate.append(rate)

    @classmethod
    def identity(cls) -> "ClockSchedule":
        return cls(0)

    def local(self, t: Time) -> Time:
        i = max(bisect.bisect_right(self._real, t) - 1, 0)
        return norm(self._local[i] + (t - self._real[i]) * self._rate[i])

    def real(self, local: Time) -> Time:
        """Inverse map: the unique real time whose local image is ``local``."""
        i = max(bisect.bisect_right(self._local, local) - 1, 0)
        return norm(self._real[i] + Fraction(local - self._local[i]) / self._rate[i])

    def segments(self):
        return list(zip(self._real, self._local, self._rate))


@dataclass(eq=False)
class Timer:
    owner: int
    id: str
    set_at: Time
    local_duration: Time
    expiry: Time
    enabled: bool = True
    fired: bool = False

    @property
    def expired(self) -> bool:
        return self.fired


class SimEvent(NamedTuple):
    fire_time: Time
    seq: int
    target: Optional[int]
    kind: str
    payload: Any = None


class Simulator:
    """Event queue ordered by ``(fire_time, seq)``; seq is assigned at scheduling."""

    def __init__(self, clocks: dict[int, ClockSchedule]):
        self.clocks = clocks
        self.now: Time = 0
        self._queue: list[SimEvent] = []
        self._seq = itertools.count()
        self._timers: dict[tuple[int, str], Timer] = {}
        self.busy = 0  # pending events other than ticks
        self.events_run = 0

    def schedule(self, time: Time, target: Optional[int], kind: str, payload=None) -> SimEvent:
        if time < self.now:
            raise ValueError(f"cannot schedule in the past ({time} < {self.now})")
        ev = SimEvent(norm(time), next(self._seq), target, kind, payload)
        heapq.heappush(self._queue, ev)
        if kind != TICK:
            self.busy += 1
        return ev

    def local_time(self, pid: int, t: Optional[Time] = None) -> Time:
        return self.clocks[pid].local(self.now if t is None else t)

    def start_timer(self, pid: int, tid: str, local_duration: Time) -> Timer:
        if local_duration <= 0:
            raise ConfigError(f"timer {tid} needs a positive duration, got {local_duration}")
        self.stop_timer(pid, tid)
        clock = self.clocks[pid]
        expiry = clock.real(clock.local(self.now) + local_duration)
        timer = Timer(pid, tid, self.now, local_duration, expiry)
        self._timers[pid, tid] = timer
        self.schedule(expiry, pid, TIMER, timer)
        return timer

    def stop_timer(self, pid: int, tid: str) -> None:
        timer = self._timers.get((pid, tid))
        if timer is not None:
            timer.enabled = False

    def timer(self, pid: int, tid: str) -> Optional[Timer]:
        return self._timers.get((pid, tid))

    def timer_enabled(self, pid: int, tid: str) -> bool:
        timer = self._timers.get((pid, tid))
        return timer is not None and timer.enabled

    def run(
        self,
        dispatch: Callable[[SimEvent], None],
        horizon: Time,
        stop: Optional[Callable[[], bool]] = None,
        idle: Optional[Callable[[], bool]] = None,
    ) -> str:
        """Run events up to ``horizon``.

        Returns ``"stopped"`` when ``stop()`` became true, ``"quiescent"`` when
        nothing but no-op ticks remain, else ``"horizon"``.
        """
        queue = self._queue
        while queue:
            if queue[0].fire_time > horizon:
                self.now = horizon
                return "horizon"
            ev = heapq.heappop(queue)
            if ev.kind != TICK:
                self.busy -= 1
            self.now = ev.fire_time
            if ev.kind == TIMER:
                timer = ev.payload
                if not timer.enabled or self._timers.get((timer.owner, timer.id)) is not timer:
                    continue
                timer.enabled = False
                timer.fired = True
            self.events_run += 1
            dispatch(ev)
            if stop is not None and stop():
                return "stopped"
            if self.busy == 0 and idle is not None and idle():
                return "quiescent"
        return "quiescent"
