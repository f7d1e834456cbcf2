"""Authenticated links under adversary control, plus Θ-reliable broadcast.

Whatever the adversary script asks for, the invariants of the partial
synchrony model are enforced here: self-addressed messages arrive at once,
and a message between correct processes sent at or after GST arrives within
delta. Script choices that break the bound are clamped and logged.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .messages import NewLeader, Prepared, SignedRecord, embedded_records
from .sim import DELIVERY, ConfigError, Simulator, Time, as_time, fmt_time, norm

PHASES = ("pre", "post")


class ForgeryError(RuntimeError):
    """A process tried to speak for another one."""


def draw_time(rng: random.Random, lo: Time, hi: Time, grain: int = 1000) -> Time:
    """Uniform draw over [lo, hi]: integers when both ends are, else an exact grid."""
    if hi == lo:
        return lo
    if isinstance(lo, int) and isinstance(hi, int):
        return rng.randint(lo, hi)
    return norm(lo + (hi - lo) * Fraction(rng.randint(0, grain), grain))


def message_view(msg) -> Optional[int]:
    return getattr(msg, "view", getattr(msg, "v", None))


@dataclass(frozen=True)
class Rule:
    """One delivery-policy entry; the first matching rule decides an envelope's fate.

    ``delay`` is a ``(lo, hi)`` range, drawn uniformly; ``drop`` a probability.
    """

    senders: Optional[frozenset] = None
    receivers: Optional[frozenset] = None
    kinds: Optional[frozenset] = None
    phase: Optional[str] = None
    views: Optional[tuple] = None
    drop: float = 0.0
    delay: Optional[tuple] = None
    deliver_now: bool = False

    def problems(self) -> list[str]:
        out = []
        if self.phase is not None and self.phase not in PHASES:
            out.append(f"rule phase must be 'pre' or 'post', got {self.phase!r}")
        if not 0 <= self.drop <= 1:
            out.append(f"rule drop probability must be in [0, 1], got {self.drop}")
        if self.views is not None and (len(self.views) != 2 or self.views[0] > self.views[1]):
            out.append(f"rule views must be a [lo, hi] range, got {list(self.views)}")
        if self.delay is not None:
            lo, hi = self.delay
            if lo < 0 or hi < lo:
                out.append(f"rule delay range must satisfy 0 <= lo <= hi, got {list(self.delay)}")
        return out

    def matches(self, sender: int, receiver: int, msg, t: Time, gst: Time) -> bool:
        if self.senders is not None and sender not in self.senders:
            return False
        if self.receivers is not None and receiver not in self.receivers:
            return False
        if self.kinds is not None and msg.kind not in self.kinds:
            return False
        if self.phase is not None and self.phase != ("pre" if t < gst else "post"):
            return False
        if self.views is not None:
            v = message_view(msg)
            if v is None or not self.views[0] <= v <= self.views[1]:
                return False
        return True

    def to_dict(self) -> dict:
        out: dict = {}
        for name in ("senders", "receivers", "kinds"):
            val = getattr(self, name)
            if val is not None:
                out[name] = sorted(val)
        if self.phase is not None:
            out["phase"] = self.phase
        if self.views is not None:
            out["views"] = list(self.views)
        if self.drop:
            out["drop"] = self.drop
        if self.delay is not None:
            out["delay"] = [fmt_time(x) for x in self.delay]
        if self.deliver_now:
            out["deliver_now"] = True
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Rule":
        known = {"senders", "receivers", "kinds", "phase", "views", "drop", "delay", "deliver_now"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown rule keys: {sorted(unknown)}")

        def opt_set(key):
            return None if d.get(key) is None else frozenset(d[key])

        delay = d.get("delay")
        if delay is not None and len(delay) != 2:
            raise ConfigError(f"rule delay must be [lo, hi], got {delay}")
        return cls(
            senders=opt_set("senders"),
            receivers=opt_set("receivers"),
            kinds=opt_set("kinds"),
            phase=d.get("phase"),
            views=None if d.get("views") is None else tuple(d["views"]),
            drop=float(d.get("drop", 0.0)),
            delay=None if delay is None else (as_time(delay[0]), as_time(delay[1])),
            deliver_now=bool(d.get("deliver_now", False)),
        )


@dataclass
class AdversaryScript:
    """Byzantine processes with their behaviours, and the delivery policy."""

    byzantine: dict = field(default_factory=dict)   # pid -> {"behavior": name, **params}
    rules: list = field(default_factory=list)

    def problems(self, n: int, f: int) -> list[str]:
        out = []
        if len(self.byzantine) > f:
            out.append(f"at most f={f} Byzantine processes allowed, got {len(self.byzantine)}")
        for pid in self.byzantine:
            if not 1 <= pid <= n:
                out.append(f"Byzantine pid {pid} out of range 1..{n}")
        for rule in self.rules:
            out.extend(rule.problems())
        return out


@dataclass
class Envelope:
    sender: int
    receiver: int
    payload: object
    send_time: Time
    delivery_time: Optional[Time]   # None means dropped
    channel: str = "p2p"


class Network:
    def __init__(self, sim: Simulator, gst: Time, delta: Time, correct: Iterable[int],
                 rules: list[Rule], rng: random.Random,
                 record: Callable[..., None], theta: Optional[Time] = None):
        self.sim = sim
        self.gst = gst
        self.delta = delta
        self.correct = frozenset(correct)
        self.rules = rules
        self.rng = rng
        self.record = record
        self.theta = theta
        self._signed: set[SignedRecord] = set()

    # -- authentication ---------------------------------------------------
    def _register(self, sender: int, msg) -> None:
        for rec in embedded_records(msg):
            if rec.signer != sender and rec not in self._signed:
                raise ForgeryError(f"p{sender} embedded a record of p{rec.signer} it never sent: {rec}")
        if isinstance(msg, (Prepared, NewLeader)):
            self._signed.add(SignedRecord(sender, msg))

    # -- delivery policy ----------------------------------------------------
    def _choose(self, sender: int, receiver: int, msg, t: Time) -> Optional[Time]:
        if sender == receiver:
            return t
        at: Optional[Time] = None
        for rule in self.rules:
            if rule.matches(sender, receiver, msg, t, self.gst):
                if rule.drop and self.rng.random() < rule.drop:
                    at = None
                elif rule.deliver_now:
                    at = t
                elif rule.delay is not None:
                    at = t + draw_time(self.rng, *rule.delay)
                else:
                    at = t + draw_time(self.rng, 0, self.delta)
                break
        else:
            at = t + draw_time(self.rng, 0, self.delta)
        if t >= self.gst and sender in self.correct and receiver in self.correct:
            bound = t + self.delta
            if at is None or at > bound:
                self.record("warning", pid=sender, what="post-GST delivery clamped to delta",
                            to=receiver, msg=str(msg), asked=fmt_time(at))
                at = bound
        return None if at is None else norm(at)

    def send(self, sender: int, receiver: int, msg) -> Envelope:
        t = self.sim.now
        self._register(sender, msg)
        at = self._choose(sender, receiver, msg, t)
        return self._post(Envelope(sender, receiver, msg, t, at))

    def rbc(self, sender: int, receivers: Iterable[int], msg) -> list[Envelope]:
        """Reliable broadcast: once a correct process receives ``msg`` at t,
        every correct process has it by max(t, GST) + theta.

        ``receivers`` are the processes the sender addresses directly; a
        Byzantine sender may address a subset and the primitive still
        reaches every correct process.
        """
        if self.theta is None:
            raise ConfigError("reliable broadcast needs theta")
        t = self.sim.now
        self._register(sender, msg)
        targets = set(receivers)
        everyone = sorted(self.correct | targets | {sender})
        tentative = {p: (self._choose(sender, p, msg, t) if p in targets else None) for p in everyone}
        reached = [at for p, at in tentative.items() if p in self.correct and at is not None]
        if reached:
            cap = norm(max(min(reached), self.gst) + self.theta)
            for p in self.correct:
                at = tentative[p]
                tentative[p] = cap if at is None else min(at, cap)
        return [self._post(Envelope(sender, p, msg, t, tentative[p], "rbc")) for p in everyone]

    def _post(self, env: Envelope) -> Envelope:
        self.record("send", pid=env.sender, to=env.receiver, msg=str(env.payload),
                    at=fmt_time(env.delivery_time), ch=env.channel)
        if env.delivery_time is not None:
            self.sim.schedule(env.delivery_time, env.receiver, DELIVERY, (env.sender, env.payload))
        return env
