"""A simulated process: FastSync plus an optional consensus replica.

The process is also the ``ctx`` its replica talks to, so every send, timer
and trace record goes through one place.
"""
from __future__ import annotations

from typing import Optional

from .byzantine import Behavior
from .fastsync import FastSync, SyncStep
from .messages import SignedRecord, Wish
from .network import ForgeryError, Network
from .sim import DELIVERY, START, TICK, TIMER, SimEvent, Simulator, Time, fmt_time
from .trace import Trace

VIEW_TIMER = "timer_view"


class Process:
    def __init__(self, pid: int, config, sim: Simulator, net: Network, trace: Trace,
                 replica_cls=None, behavior: Optional[Behavior] = None, myval=None):
        self.pid = pid
        self.n = config.n
        self.config = config
        self.sim = sim
        self.net = net
        self.trace = trace
        self.behavior = behavior
        self.sync = FastSync(pid, config.n, config.f)
        self.replica = None
        if replica_cls is not None:
            self.replica = replica_cls(pid, config, self, myval)
        self._everyone = list(range(1, config.n + 1))

    @property
    def correct(self) -> bool:
        return self.behavior is None

    @property
    def silent(self) -> bool:
        return self.behavior is not None and self.behavior.silent

    # -- ctx API used by replicas ------------------------------------------
    def now(self) -> Time:
        return self.sim.now

    def record(self, kind: str, **detail) -> None:
        self.trace.record(self.sim.now, self.pid, kind, **detail)

    def send(self, to: int, msg) -> None:
        self._emit([to], msg)

    def send_all(self, msg) -> None:
        self._emit(self._everyone, msg)

    def start_timer(self, tid: str, duration: Time) -> None:
        timer = self.sim.start_timer(self.pid, tid, duration)
        self.record("timer_set", timer=tid, duration=fmt_time(duration), expiry=fmt_time(timer.expiry))

    def stop_timer(self, tid: str) -> None:
        if self.sim.timer_enabled(self.pid, tid):
            self.sim.stop_timer(self.pid, tid)
            self.record("timer_stop", timer=tid)

    def timer(self, tid: str):
        return self.sim.timer(self.pid, tid)

    # -- sending -------------------------------------------------------------
    def _emit(self, targets: list[int], msg, sender: Optional[int] = None) -> None:
        if sender is not None and sender != self.pid:
            raise ForgeryError(f"p{self.pid} tried to send as p{sender}")
        parts = [(targets, msg)] if self.behavior is None else self.behavior.outgoing(self, targets, msg)
        rbc = self.replica is not None and self.replica.uses_rbc and not isinstance(msg, Wish)
        for tos, m in parts:
            if rbc:
                self.net.rbc(self.pid, tos, m)
            else:
                for to in tos:
                    self.net.send(self.pid, to, m)

    def _wish(self, v: int) -> None:
        self.record("wish", v=v)
        self.send_all(Wish(v))

    # -- synchronizer glue ---------------------------------------------------
    def _apply(self, step: SyncStep) -> None:
        if step.enter is not None:
            v = step.enter
            self.stop_timer(VIEW_TIMER)
            self.start_timer(VIEW_TIMER, self.config.F(v))
            self.record("enter", v=v)
            if self.replica is not None:
                self.replica.on_new_view(v)
        if step.wish is not None:
            self._wish(step.wish)

    # -- event dispatch --------------------------------------------------------
    def handle(self, ev: SimEvent) -> None:
        if self.behavior is not None and (self.silent or not self.behavior.active(self.sim.now)):
            return
        if ev.kind == DELIVERY:
            sender, msg = ev.payload
            if isinstance(msg, Wish):
                self._apply(self.sync.handle_wish(sender, msg.v))
            elif self.replica is not None:
                self.replica.on_receive(SignedRecord(sender, msg))
        elif ev.kind == TIMER:
            tid = ev.payload.id
            self.record("timer_expire", timer=tid)
            if tid == VIEW_TIMER:
                self._apply(self.sync.handle_timer_expiry())
            elif self.replica is not None:
                self.replica.on_timer(tid)
        elif ev.kind == TICK:
            self.sync.timer_enabled = self.sim.timer_enabled(self.pid, VIEW_TIMER)
            self._apply(self.sync.handle_periodic())
        elif ev.kind == START:
            self.record("start")
            self._apply(self.sync.start())
