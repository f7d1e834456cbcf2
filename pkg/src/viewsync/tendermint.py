"""Single-shot Tendermint over reliable broadcast.

No certificates travel in messages: a replica releases its lock only on
PREPARED quorums it has itself received.
"""
from __future__ import annotations

from typing import Optional

from .common import Replica, leader, prepared_evidence
from .messages import Committed, Prepared, Propose, SignedRecord, Value, digest

LOCK_TIMER = "timer_lock"


def tm_check_safe_proposal(m: Propose, sender: int, *, n: int, locked_view: int,
                           locked_val: Optional[Value], evidence: set[tuple[int, str]],
                           valid=lambda x: x.valid) -> bool:
    if m.view < 1 or sender != leader(m.view, n) or m.value is None or not valid(m.value):
        return False
    if locked_view == 0 or m.value == locked_val:
        return True
    h = digest(m.value)
    return any(m.view > vp > locked_view and hh == h for vp, hh in evidence)


class Tendermint(Replica):
    protocol = "tendermint"
    kinds = ("PROPOSE", "PREPARED", "COMMITTED")
    lock_phase = "prepared"
    uses_rbc = True

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.prepared_val: Optional[Value] = None
        self.prepared_view = 0
        self.locked_view = 0
        self.locked_val: Optional[Value] = None

    def state(self) -> dict:
        return {"cv": self.curr_view, "pv": self.prepared_view, "lv": self.locked_view}

    def enter_view(self, v: int) -> None:
        self.ctx.start_timer(LOCK_TIMER, self.config.lock_timeout(v))
        if self.pid == self.leader(v) and self.once("propose"):
            if self.prepared_view:
                m = Propose(v, self.prepared_val, self.prepared_view)
            else:
                m = Propose(v, self.myval(), 0)
            self.ctx.record("propose", v=v, value=str(m.value))
            self.ctx.send_all(m)

    def guards(self):
        return [self._on_propose, self._on_prepared, self._on_committed]

    def safe_proposal(self, rec: SignedRecord) -> bool:
        return tm_check_safe_proposal(rec.body, rec.signer, n=self.n,
                                      locked_view=self.locked_view, locked_val=self.locked_val,
                                      evidence=prepared_evidence(self.mailbox, self.f),
                                      valid=self.valid)

    def _on_propose(self) -> bool:
        v = self.curr_view
        rec = self.mailbox.get("PROPOSE", self.leader(v))
        if self.voted or rec is None or rec.body.view != v or not self.safe_proposal(rec):
            return False
        self.curr_val = rec.body.value
        self.voted = True
        self.ctx.record("vote", v=v, value=str(self.curr_val))
        self.ctx.send_all(Prepared(v, digest(self.curr_val)))
        return True

    def _on_prepared(self) -> bool:
        v = self.curr_view
        if not self.voted or "prepared" in self._fired:
            return False
        h = digest(self.curr_val)
        if len(self.matching("PREPARED", v, h)) < self.quorum:
            return False
        self.once("prepared")
        self.prepared_val = self.curr_val
        self.prepared_view = v
        self.ctx.record("prepare", v=v, value=str(self.curr_val))
        timer = self.ctx.timer(LOCK_TIMER)
        if timer is not None and timer.enabled:
            self.locked_view = v
            self.locked_val = self.curr_val
            self.ctx.record("lock", v=v, value=str(self.curr_val), phase="prepared")
            self.ctx.send_all(Committed(v, h))
        return True

    def _on_committed(self) -> bool:
        v = self.curr_view
        if self.locked_view != v or "committed" in self._fired:
            return False
        if len(self.matching("COMMITTED", v, digest(self.curr_val))) < self.quorum:
            return False
        self.once("committed")
        self.decide()
        return True
