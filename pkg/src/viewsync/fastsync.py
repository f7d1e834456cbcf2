"""The FastSync view synchronizer as a pure state machine.

The class holds only the O(n) view array and the two derived views; timers
and sends are returned to the caller as :class:`SyncStep` values, which keeps
the logic testable without a simulator.
"""
from __future__ import annotations

from typing import NamedTuple, Optional, Sequence


def derive_views(max_views: Sequence[int], f: int) -> tuple[int, int]:
    """(view, view_plus): the (2f+1)-th and (f+1)-th largest entries.

    The k-th largest entry is the largest v that at least k entries reach.
    """
    ranked = sorted(max_views, reverse=True)
    return ranked[2 * f], ranked[f]


class SyncStep(NamedTuple):
    enter: Optional[int] = None   # view to enter (timer_view restarts with F(enter))
    wish: Optional[int] = None    # WISH view to send to every process


NOTHING = SyncStep()


class FastSync:
    __slots__ = ("pid", "n", "f", "max_views", "view", "view_plus", "started",
                 "last_entered", "timer_enabled")

    def __init__(self, pid: int, n: int, f: int):
        self.pid = pid
        self.n = n
        self.f = f
        self.max_views = [0] * n
        self.view = 0
        self.view_plus = 0
        self.started = False
        self.last_entered = 0
        self.timer_enabled = False

    def start(self) -> SyncStep:
        if self.started:
            return NOTHING
        self.started = True
        return SyncStep(wish=1) if self.view_plus == 0 else NOTHING

    def handle_wish(self, sender: int, v: int) -> SyncStep:
        if v < 1:
            raise ValueError(f"WISH for view {v}")
        prev_v, prev_v_plus = self.view, self.view_plus
        idx = sender - 1
        if v <= self.max_views[idx]:
            return NOTHING
        self.max_views[idx] = v
        self.view, self.view_plus = derive_views(self.max_views, self.f)
        enter = wish = None
        if self.view_plus == self.view and self.view > prev_v:
            enter = self.view
            self.last_entered = self.view
            self.timer_enabled = True
        if self.view_plus > prev_v_plus:
            wish = self.view_plus
        return SyncStep(enter, wish)

    def handle_timer_expiry(self) -> SyncStep:
        assert self.view > 0, "timer_view expired before any view was entered"
        self.timer_enabled = False
        return SyncStep(wish=max(self.view + 1, self.view_plus))

    def handle_periodic(self) -> SyncStep:
        if self.timer_enabled:
            return SyncStep(wish=self.view_plus)
        if self.max_views[self.pid - 1] > 0:
            return SyncStep(wish=max(self.view + 1, self.view_plus))
        return NOTHING

    def snapshot(self) -> dict:
        return {"max_views": list(self.max_views), "view": self.view,
                "view_plus": self.view_plus, "entered": self.last_entered}
