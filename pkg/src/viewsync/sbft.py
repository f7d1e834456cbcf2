"""Single-shot all-to-all SBFT: a PBFT slow path plus a fast path on n matching votes."""
from __future__ import annotations

from typing import NamedTuple, Optional

from .common import check_prepared, leader
from .messages import NewLeader, Propose, SignedRecord, Value, digest
from .pbft import Pbft, valid_newleader_set

FAST_PATH_TIMER = "timer_fast_path"


class Candidates(NamedTuple):
    x_slow: Optional[Value]
    v_slow: int
    x_fast: Optional[Value]
    v_fast: int


def sbft_valid_newleader(m: NewLeader, f: int) -> bool:
    if not isinstance(m, NewLeader) or not m.vview <= m.pre_view < m.view:
        return False
    return m.vview == 0 or check_prepared(m.cert, m.vview, digest(m.val), f)


def sbft_compute_candidates(bodies: list[NewLeader], f: int) -> Candidates:
    """Slow candidate: the highest locked value. Fast candidate: the value whose
    (f+1)-th highest supporting pre_view is largest, provided no other value ties."""
    x_slow, v_slow = None, 0
    for m in bodies:
        if m.vview > v_slow:
            x_slow, v_slow = m.val, m.vview
    support: dict[Value, list[int]] = {}
    for m in bodies:
        if m.cur_val is not None:
            support.setdefault(m.cur_val, []).append(m.pre_view)
    # the best f+1 supporters of x are its f+1 highest pre_views
    best = {x: sorted(views, reverse=True)[f] for x, views in support.items() if len(views) > f}
    v_fast = max(best.values(), default=0)
    tops = [x for x, v in best.items() if v == v_fast]
    if len(tops) != 1:
        return Candidates(x_slow, v_slow, None, 0)
    return Candidates(x_slow, v_slow, tops[0], v_fast)


def sbft_choose(c: Candidates) -> Optional[Value]:
    """The value a leader must propose, or None when it is free to pick its own."""
    if c.v_slow >= c.v_fast and c.v_slow > 0:
        return c.x_slow
    if c.v_fast > c.v_slow:
        return c.x_fast
    return None


def sbft_select_proposal(v: int, records: list[SignedRecord], myval: Value, f: int) -> Propose:
    x = sbft_choose(sbft_compute_candidates([r.body for r in records], f))
    return Propose(v, myval if x is None else x, tuple(sorted(records, key=lambda r: r.signer)))


def sbft_check_safe_proposal(m: Propose, sender: int, *, n: int, f: int,
                             valid=lambda x: x.valid) -> bool:
    if m.view < 1 or sender != leader(m.view, n) or m.value is None or not valid(m.value):
        return False
    if m.view == 1:
        return True
    if not valid_newleader_set(m.just, m.view, f, check=sbft_valid_newleader):
        return False
    x = sbft_choose(sbft_compute_candidates([r.body for r in m.just], f))
    return x is None or x == m.value


class Sbft(Pbft):
    protocol = "sbft"
    fast_timer = True

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.pre_view = 0

    def state(self) -> dict:
        return {"cv": self.curr_view, "lv": self.locked_view, "prev": self.pre_view}

    def newleader(self, v: int) -> NewLeader:
        return NewLeader(v, self.locked_view, self.prepared_val, self.cert,
                         self.pre_view, self.curr_val)

    def valid_newleader(self, m, f) -> bool:
        return sbft_valid_newleader(m, f)

    def select(self, v: int, records) -> Propose:
        return sbft_select_proposal(v, records, self.myval(), self.f)

    def safe_proposal(self, rec: SignedRecord) -> bool:
        return sbft_check_safe_proposal(rec.body, rec.signer, n=self.n, f=self.f, valid=self.valid)

    def accepted(self, v: int) -> None:
        self.pre_view = v
        if self.fast_timer:
            self.ctx.start_timer(FAST_PATH_TIMER, self.config.fast_path_timeout(v))

    def guards(self):
        return [self._on_newleaders, self._on_propose, self._on_fast,
                self._on_prepared, self._on_committed]

    def _on_fast(self) -> bool:
        v = self.curr_view
        if not self.voted or "fast" in self._fired:
            return False
        if len(self.matching("PREPARED", v, digest(self.curr_val))) < self.n:
            return False
        self.once("fast")
        self.decide("fast")
        return True

    def _on_prepared(self) -> bool:
        if self.fast_timer and self.voted and "prepared" not in self._fired:
            timer = self.ctx.timer(FAST_PATH_TIMER)
            if timer is None or not timer.expired:
                return False
        return super()._on_prepared()


class SbftNoTimer(Sbft):
    """Variant that sends COMMITTED as soon as a PREPARED quorum arrives."""

    protocol = "sbft-no-timer"
    fast_timer = False


__all__ = ["Candidates", "sbft_valid_newleader", "sbft_compute_candidates", "sbft_choose",
           "sbft_select_proposal", "sbft_check_safe_proposal", "Sbft", "SbftNoTimer"]
