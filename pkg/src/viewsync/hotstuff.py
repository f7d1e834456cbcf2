"""Single-shot HotStuff, three-phase and two-phase."""
from __future__ import annotations

from typing import Optional

from .common import Replica, check_prepared, cert_view, newleader_select
from .messages import (
    Committed,
    NewLeader,
    PreCommitted,
    Prepared,
    Propose,
    SignedRecord,
    Value,
    digest,
)

NEWLEADER_TIMER = "timer_newleader"


def valid_newleader(m: NewLeader, f: int) -> bool:
    if not isinstance(m, NewLeader) or not m.vview < m.view:
        return False
    return m.vview == 0 or check_prepared(m.cert, m.vview, digest(m.val), f)


def hs3_select_proposal(v: int, records: list[SignedRecord], myval: Value) -> Propose:
    best = newleader_select(records)
    if best is None:
        return Propose(v, myval, None)
    return Propose(v, best.val, best.cert)


def hs_check_safe_proposal(m: Propose, sender: int, *, n: int, f: int, locked_view: int,
                           prepared_val: Optional[Value], valid=lambda x: x.valid) -> bool:
    from .common import leader
    if m.view < 1 or sender != leader(m.view, n) or m.value is None or not valid(m.value):
        return False
    if locked_view == 0 or m.value == prepared_val:
        return True
    cert = m.just if isinstance(m.just, frozenset) else None
    v_cert = cert_view(cert)
    return (v_cert is not None and m.view > v_cert > locked_view
            and check_prepared(cert, v_cert, digest(m.value), f))


class HotStuff(Replica):
    protocol = "hotstuff3"
    kinds = ("NEWLEADER", "PROPOSE", "PREPARED", "PRECOMMITTED", "COMMITTED")
    lock_phase = "precommitted"
    two_phase = False

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.prepared_val: Optional[Value] = None
        self.prepared_view = 0
        self.locked_view = 0
        self.cert = None

    def state(self) -> dict:
        return {"cv": self.curr_view, "pv": self.prepared_view, "lv": self.locked_view}

    def enter_view(self, v: int) -> None:
        if self.two_phase:
            self.ctx.stop_timer(NEWLEADER_TIMER)
            if self.pid == self.leader(v) and v > 1:
                self.ctx.start_timer(NEWLEADER_TIMER, self.config.newleader_timeout(v))
        if v == 1:
            # nothing can have been decided before view 1: propose at once, skip NEWLEADER
            if self.pid == self.leader(1) and self.once("propose"):
                self._propose(Propose(1, self.myval(), None))
            return
        self.ctx.send(self.leader(v), NewLeader(v, self.prepared_view, self.prepared_val, self.cert))

    def guards(self):
        return [self._on_newleaders, self._on_propose, self._on_prepared,
                self._on_precommitted, self._on_committed]

    def _propose(self, m: Propose) -> None:
        self.ctx.record("propose", v=m.view, value=str(m.value))
        self.ctx.send_all(m)

    def _valid_newleaders(self, v: int) -> list[SignedRecord]:
        return [r for r in self.mailbox.records("NEWLEADER", v) if valid_newleader(r.body, self.f)]

    def _on_newleaders(self) -> bool:
        v = self.curr_view
        if v <= 1 or self.pid != self.leader(v) or "propose" in self._fired:
            return False
        if self.two_phase:
            timer = self.ctx.timer(NEWLEADER_TIMER)
            if timer is None or not timer.expired:
                return False
        records = self._valid_newleaders(v)
        if len(records) < self.quorum:
            return False
        self.once("propose")
        self._propose(hs3_select_proposal(v, records, self.myval()))
        return True

    def safe_proposal(self, rec: SignedRecord) -> bool:
        return hs_check_safe_proposal(rec.body, rec.signer, n=self.n, f=self.f,
                                      locked_view=self.locked_view,
                                      prepared_val=self.prepared_val, valid=self.valid)

    def _on_propose(self) -> bool:
        v = self.curr_view
        rec = self.mailbox.get("PROPOSE", self.leader(v))
        if self.voted or rec is None or rec.body.view != v or not self.safe_proposal(rec):
            return False
        self.curr_val = rec.body.value
        self.voted = True
        self.accepted(v)
        self.ctx.record("vote", v=v, value=str(self.curr_val))
        self.ctx.send_all(Prepared(v, digest(self.curr_val)))
        return True

    def accepted(self, v: int) -> None:
        pass

    def _on_prepared(self) -> bool:
        v = self.curr_view
        if not self.voted or "prepared" in self._fired:
            return False
        h = digest(self.curr_val)
        recs = self.matching("PREPARED", v, h)
        if len(recs) < self.quorum:
            return False
        self.once("prepared")
        self.prepared_val = self.curr_val
        self.prepared_view = v
        self.cert = frozenset(recs)
        self.ctx.record("prepare", v=v, value=str(self.curr_val))
        if self.two_phase:
            self.locked_view = v
            self.ctx.record("lock", v=v, value=str(self.curr_val), phase="prepared")
            self.ctx.send_all(Committed(v, h))
        else:
            self.ctx.send_all(PreCommitted(v, h))
        return True

    def _on_precommitted(self) -> bool:
        v = self.curr_view
        if self.two_phase or self.prepared_view != v or "precommitted" in self._fired:
            return False
        h = digest(self.curr_val)
        if len(self.matching("PRECOMMITTED", v, h)) < self.quorum:
            return False
        self.once("precommitted")
        self.locked_view = self.prepared_view
        self.ctx.record("lock", v=v, value=str(self.curr_val), phase="precommitted")
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


class TwoPhaseHotStuff(HotStuff):
    protocol = "hotstuff2"
    kinds = ("NEWLEADER", "PROPOSE", "PREPARED", "COMMITTED")
    lock_phase = "prepared"
    two_phase = True
