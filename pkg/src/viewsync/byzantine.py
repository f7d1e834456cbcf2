"""Built-in Byzantine behaviours.

A non-silent Byzantine process runs the honest synchronizer and replica code;
its behaviour rewrites what it sends. It can only ever send under its own id
and embed records other processes really signed, since the network checks both.
"""
from __future__ import annotations

from .messages import Committed, PreCommitted, Prepared, Propose, Value, Wish, digest
from .sim import ConfigError, Time, as_time

Targets = list[int]


class Behavior:
    name = ""
    params: tuple = ()
    silent = False

    def __init__(self, pid: int, n: int, f: int, **params):
        self.pid = pid
        self.n = n
        self.f = f

    def active(self, now: Time) -> bool:
        return True

    def outgoing(self, node, targets: Targets, msg) -> list[tuple[Targets, object]]:
        return [(targets, msg)]

    def halves(self, targets: Targets) -> tuple[Targets, Targets]:
        others = [p for p in targets if p != self.pid]
        cut = (len(others) + 1) // 2
        first = others[:cut] + ([self.pid] if self.pid in targets else [])
        return sorted(first), others[cut:]


class Silent(Behavior):
    name = "silent"
    silent = True


class Crash(Behavior):
    """Honest until ``at``, then silent forever."""

    name = "crash"
    params = ("at",)

    def __init__(self, pid, n, f, at=0):
        super().__init__(pid, n, f)
        self.at = as_time(at)

    def active(self, now):
        return now < self.at


class WishEquivocator(Behavior):
    """Sends its WISHes (optionally inflated by ``boost``) only to ``targets``,
    withholding them from everyone else."""

    name = "wish-equivocator"
    params = ("targets", "boost", "until")

    def __init__(self, pid, n, f, targets=None, boost=0, until=None):
        super().__init__(pid, n, f)
        if targets is None:
            targets = self.halves(list(range(1, n + 1)))[0]
        self.targets = sorted(set(targets) | {pid})
        self.boost = int(boost)
        self.until = None if until is None else as_time(until)

    def outgoing(self, node, targets, msg):
        if not isinstance(msg, Wish) or (self.until is not None and node.now() >= self.until):
            return [(targets, msg)]
        return [([p for p in targets if p in self.targets], Wish(msg.v + self.boost))]


class EquivocatingLeader(Behavior):
    """As leader, proposes its value to one half and a conflicting one to the
    other, then votes for each value towards the matching half."""

    name = "equivocating-leader"

    def __init__(self, pid, n, f):
        super().__init__(pid, n, f)
        self.split: dict[int, tuple[str, str]] = {}

    def outgoing(self, node, targets, msg):
        if isinstance(msg, Propose):
            alt = Value(f"e{self.pid}.{msg.view}")
            a, b = self.halves(targets)
            self.split[msg.view] = (digest(msg.value), digest(alt))
            return [(a, msg), (b, Propose(msg.view, alt, msg.just))]
        if isinstance(msg, (Prepared, PreCommitted, Committed)) and msg.view in self.split:
            mine, alt = self.split[msg.view]
            if msg.h == mine:
                a, b = self.halves(targets)
                return [(a, msg), (b, type(msg)(msg.view, alt))]
        return [(targets, msg)]


class StaleCertLeader(Behavior):
    """As leader, ignores the newest lock: proposes the oldest prepared value
    older than it, or a fresh value when there is none."""

    name = "stale-cert-leader"

    def outgoing(self, node, targets, msg):
        if not isinstance(msg, Propose) or msg.view <= 1:
            return [(targets, msg)]
        v = msg.view
        fresh = Value(f"s{self.pid}.{v}")
        reported = []
        if node.replica is not None:
            reported = [rec.body for rec in node.replica.mailbox.records("NEWLEADER", v) if rec.body.vview]
        newest = max((m.vview for m in reported), default=0)
        older = [m for m in reported if m.vview < newest]
        stale = min(older, key=lambda m: m.vview) if older else None
        if isinstance(msg.just, tuple):
            return [(targets, Propose(v, fresh if stale is None else stale.val, msg.just))]
        if isinstance(msg.just, int):
            return [(targets, Propose(v, fresh, 0))]
        if stale is None:
            return [(targets, Propose(v, fresh, None))]
        return [(targets, Propose(v, stale.val, stale.cert))]


class InvalidValue(Behavior):
    """As leader, proposes a value that fails valid()."""

    name = "invalid-value"

    def outgoing(self, node, targets, msg):
        if isinstance(msg, Propose):
            return [(targets, Propose(msg.view, Value(f"bad{self.pid}.{msg.view}", valid=False), msg.just))]
        return [(targets, msg)]


BEHAVIORS = {cls.name: cls for cls in (Silent, Crash, WishEquivocator, EquivocatingLeader,
                                       StaleCertLeader, InvalidValue)}


def behavior_problems(spec: dict) -> list[str]:
    name = spec.get("behavior")
    if name not in BEHAVIORS:
        return [f"unknown Byzantine behavior {name!r} (known: {', '.join(sorted(BEHAVIORS))})"]
    unknown = set(spec) - {"behavior"} - set(BEHAVIORS[name].params)
    if unknown:
        return [f"behavior {name!r} does not take {sorted(unknown)}"]
    return []


def make_behavior(spec: dict, pid: int, n: int, f: int) -> Behavior:
    problems = behavior_problems(spec)
    if problems:
        raise ConfigError("; ".join(problems))
    params = {k: v for k, v in spec.items() if k != "behavior"}
    return BEHAVIORS[spec["behavior"]](pid, n, f, **params)


__all__ = ["Behavior", "BEHAVIORS", "make_behavior", "behavior_problems"]
