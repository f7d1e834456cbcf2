"""Single-shot all-to-all PBFT.

The leader justifies its proposal with the whole NEWLEADER quorum M, and
every replica re-derives the leader's choice from M before voting.
"""
from __future__ import annotations

from typing import Optional

from .common import Replica, leader, newleader_select
from .hotstuff import valid_newleader
from .messages import Committed, NewLeader, Prepared, Propose, SignedRecord, Value, digest


def pbft_select_proposal(v: int, records: list[SignedRecord], myval: Value) -> Propose:
    best = newleader_select(records)
    x = myval if best is None else best.val
    return Propose(v, x, tuple(sorted(records, key=lambda r: r.signer)))


def valid_newleader_set(M, v: int, f: int, check=valid_newleader) -> bool:
    """M is a quorum of distinct signers' NEWLEADER(v, ...) records, each valid."""
    if not isinstance(M, tuple):
        return False
    signers = set()
    for rec in M:
        if not isinstance(rec, SignedRecord) or not isinstance(rec.body, NewLeader):
            return False
        if rec.body.view != v or rec.signer in signers or not check(rec.body, f):
            return False
        signers.add(rec.signer)
    return len(signers) >= 2 * f + 1


def pbft_check_safe_proposal(m: Propose, sender: int, *, n: int, f: int,
                             valid=lambda x: x.valid) -> bool:
    if m.view < 1 or sender != leader(m.view, n) or m.value is None or not valid(m.value):
        return False
    if m.view == 1:
        return True
    if not valid_newleader_set(m.just, m.view, f):
        return False
    top = max(rec.body.vview for rec in m.just)
    if top == 0:
        return True
    return any(rec.body.vview == top and rec.body.val == m.value for rec in m.just)


class Pbft(Replica):
    protocol = "pbft"
    kinds = ("NEWLEADER", "PROPOSE", "PREPARED", "COMMITTED")
    lock_phase = "prepared"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.prepared_val: Optional[Value] = None
        self.locked_view = 0
        self.cert = None

    def state(self) -> dict:
        return {"cv": self.curr_view, "lv": self.locked_view}

    def newleader(self, v: int) -> NewLeader:
        return NewLeader(v, self.locked_view, self.prepared_val, self.cert)

    def valid_newleader(self, m, f) -> bool:
        return valid_newleader(m, f)

    def select(self, v: int, records) -> Propose:
        return pbft_select_proposal(v, records, self.myval())

    def safe_proposal(self, rec: SignedRecord) -> bool:
        return pbft_check_safe_proposal(rec.body, rec.signer, n=self.n, f=self.f, valid=self.valid)

    def enter_view(self, v: int) -> None:
        if v == 1:
            if self.pid == self.leader(1) and self.once("propose"):
                self._propose(Propose(1, self.myval(), ()))
            return
        self.ctx.send(self.leader(v), self.newleader(v))

    def guards(self):
        return [self._on_newleaders, self._on_propose, self._on_prepared, self._on_committed]

    def _propose(self, m: Propose) -> None:
        self.ctx.record("propose", v=m.view, value=str(m.value))
        self.ctx.send_all(m)

    def _on_newleaders(self) -> bool:
        v = self.curr_view
        if v <= 1 or self.pid != self.leader(v) or "propose" in self._fired:
            return False
        records = [r for r in self.mailbox.records("NEWLEADER", v)
                   if self.valid_newleader(r.body, self.f)]
        if len(records) < self.quorum:
            return False
        self.once("propose")
        self._propose(self.select(v, records))
        return True

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

    def lock(self, recs) -> None:
        v = self.curr_view
        self.prepared_val = self.curr_val
        self.locked_view = v
        self.cert = frozenset(recs)
        self.ctx.record("prepare", v=v, value=str(self.curr_val))
        self.ctx.record("lock", v=v, value=str(self.curr_val), phase="prepared")
        self.ctx.send_all(Committed(v, digest(self.curr_val)))

    def _on_prepared(self) -> bool:
        v = self.curr_view
        if not self.voted or "prepared" in self._fired:
            return False
        recs = self.matching("PREPARED", v, digest(self.curr_val))
        if len(recs) < self.quorum:
            return False
        self.once("prepared")
        self.lock(recs)
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
