"""Consensus infrastructure shared by every single-shot protocol."""
from __future__ import annotations

from typing import Callable, Iterable, Optional

from .messages import (
    NewLeader,
    Prepared,
    SignedRecord,
    Value,
    digest,
)


def leader(v: int, n: int) -> int:
    """Round-robin leader of view ``v`` (processes are numbered from 1)."""
    if v < 1:
        raise ValueError(f"views start at 1, got {v}")
    return (v - 1) % n + 1


def is_quorum(members: Iterable[int], f: int) -> bool:
    return len(set(members)) >= 2 * f + 1


def check_prepared(cert, v: int, h: str, f: int) -> bool:
    """True iff ``cert`` holds PREPARED(v, h) records from a quorum and nothing else."""
    if not cert:
        return False
    signers = set()
    for rec in cert:
        body = rec.body
        if not isinstance(body, Prepared) or body.view != v or body.h != h:
            return False
        signers.add(rec.signer)
    return len(signers) >= 2 * f + 1


def cert_view(cert) -> Optional[int]:
    """The single view a certificate speaks for, or None if it is mixed or empty."""
    views = {rec.body.view for rec in cert or () if isinstance(rec.body, Prepared)}
    return views.pop() if len(views) == 1 else None


class Mailbox:
    """Keeps, per (message type, sender), only the highest-view message."""

    def __init__(self):
        self._slots: dict[tuple[str, int], SignedRecord] = {}

    def insert(self, rec: SignedRecord) -> bool:
        key = (rec.body.kind, rec.signer)
        old = self._slots.get(key)
        if old is not None and rec.body.view <= old.body.view:
            return False
        self._slots[key] = rec
        return True

    def get(self, kind: str, sender: int) -> Optional[SignedRecord]:
        return self._slots.get((kind, sender))

    def records(self, kind: str, view: Optional[int] = None) -> list[SignedRecord]:
        out = [r for (k, _), r in self._slots.items() if k == kind]
        if view is not None:
            out = [r for r in out if r.body.view == view]
        out.sort(key=lambda r: r.signer)
        return out

    def __len__(self):
        return len(self._slots)


class Replica:
    """Base for a consensus replica driven by ``new_view`` and deliveries.

    ``ctx`` is the hosting process; it provides ``send``, ``send_all``,
    ``start_timer``, ``stop_timer``, ``timer`` and ``record``.
    Guards are level-triggered: after every stimulus they are re-evaluated in
    order until none fires, and each fires at most once per view.
    """

    protocol = ""
    kinds: tuple = ()
    lock_phase = "prepared"
    uses_rbc = False

    def __init__(self, pid: int, config, ctx, myval: Callable[[], Value],
                 valid: Callable[[Optional[Value]], bool] = None):
        self.pid = pid
        self.n = config.n
        self.f = config.f
        self.config = config
        self.ctx = ctx
        self.myval = myval
        self.valid = valid or (lambda x: x is not None and x.valid)
        self.mailbox = Mailbox()
        self.curr_view = 0
        self.voted = False
        self.curr_val: Optional[Value] = None
        self.decided: Optional[Value] = None
        self._fired: set[str] = set()
        self._last_state = None

    # -- helpers ---------------------------------------------------------
    @property
    def quorum(self) -> int:
        return 2 * self.f + 1

    def leader(self, v: int) -> int:
        return leader(v, self.n)

    def once(self, phase: str) -> bool:
        """Mark ``phase`` fired in the current view; False if it already was."""
        if phase in self._fired:
            return False
        self._fired.add(phase)
        return True

    def matching(self, kind: str, v: int, h: str) -> list[SignedRecord]:
        return [r for r in self.mailbox.records(kind, v) if r.body.h == h]

    def decide(self, path: str = "slow") -> None:
        x = self.curr_val
        repeat = self.decided is not None
        if not repeat:
            self.decided = x
        elif x == self.decided:
            return
        self.ctx.record("decide", v=self.curr_view, value=str(x), valid=bool(x is not None and x.valid),
                        path=path, repeat=repeat)

    def state(self) -> dict:
        return {"cv": self.curr_view}

    def _record_state(self) -> None:
        st = self.state()
        key = tuple(st.values())
        if key != self._last_state:
            self._last_state = key
            self.ctx.record("state", **st)

    # -- stimuli ---------------------------------------------------------
    def on_new_view(self, v: int) -> None:
        self.curr_view = v
        self.voted = False
        self._fired = set()
        self.enter_view(v)
        self.evaluate()

    def on_receive(self, rec: SignedRecord) -> None:
        if rec.body.kind in self.kinds:
            self.mailbox.insert(rec)
            self.evaluate()

    def on_timer(self, tid: str) -> None:
        self.evaluate()

    def evaluate(self) -> None:
        if self.curr_view > 0:
            guards = self.guards()
            while any(g() for g in guards):
                pass
        self._record_state()

    # -- protocol hooks --------------------------------------------------
    def enter_view(self, v: int) -> None:
        raise NotImplementedError

    def guards(self) -> list[Callable[[], bool]]:
        raise NotImplementedError


def newleader_select(records: list[SignedRecord]):
    """Highest-view (value, justification) among NEWLEADER records, or None if all views are 0.

    Ties go to the lowest signer; well-formed certificates at one view agree
    on the value anyway.
    """
    best = None
    for rec in records:
        m: NewLeader = rec.body
        if m.vview and (best is None or m.vview > best.vview):
            best = m
    return best


def prepared_evidence(mailbox: Mailbox, f: int) -> set[tuple[int, str]]:
    """(view, hash) pairs backed by PREPARED records from a quorum of distinct senders."""
    counts: dict[tuple[int, str], int] = {}
    for rec in mailbox.records("PREPARED"):
        key = (rec.body.view, rec.body.h)
        counts[key] = counts.get(key, 0) + 1
    return {k for k, c in counts.items() if c >= 2 * f + 1}


__all__ = [
    "leader", "is_quorum", "check_prepared", "cert_view", "Mailbox", "Replica",
    "newleader_select", "prepared_evidence", "digest",
]
