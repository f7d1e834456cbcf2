"""Assemble a scenario into processes, a network and a simulator, and run it."""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .byzantine import make_behavior
from .config import Config
from .hotstuff import HotStuff, TwoPhaseHotStuff
from .messages import Value
from .network import AdversaryScript, Network, draw_time
from .node import VIEW_TIMER, Process
from .pbft import Pbft
from .sbft import Sbft, SbftNoTimer
from .sim import START, TICK, ClockSchedule, ConfigError, SimEvent, Simulator, Time, as_time, fmt_time
from .tendermint import Tendermint
from .trace import Trace

PROTOCOLS = {
    "none": None,
    "hotstuff3": HotStuff,
    "hotstuff2": TwoPhaseHotStuff,
    "pbft": Pbft,
    "sbft": Sbft,
    "sbft-no-timer": SbftNoTimer,
    "tendermint": Tendermint,
}

# auxiliary timeout each protocol needs
AUX_TIMEOUT = {"hotstuff2": "newleader_timeout", "sbft": "fast_path_timeout",
               "tendermint": "lock_timeout"}


@dataclass
class Scenario:
    """Everything that determines a run, given the seed in ``config``.

    ``starts`` maps pid to a start time, or is ``{"uniform": [lo, hi]}``.
    ``clocks`` maps pid to pre-GST ``[(real_start, rate), ...]`` segments, or is
    ``{"random_rates": [...], "segment": length}``. Processes with no start
    never call start().
    """

    config: Config
    protocol: str = "none"
    theta: Optional[Time] = None
    starts: dict = field(default_factory=dict)
    clocks: dict = field(default_factory=dict)
    adversary: AdversaryScript = field(default_factory=AdversaryScript)
    stop_on_decide: bool = True

    def problems(self) -> list[str]:
        cfg = self.config
        out = cfg.problems()
        if self.protocol not in PROTOCOLS:
            out.append(f"unknown protocol {self.protocol!r} (known: {', '.join(PROTOCOLS)})")
        aux = AUX_TIMEOUT.get(self.protocol)
        if aux and getattr(cfg, aux) is None:
            out.append(f"protocol {self.protocol} needs timeouts.{aux.replace('_timeout', '')}")
        if self.protocol == "tendermint" and (self.theta is None or self.theta <= 0):
            out.append("tendermint needs a positive protocol.theta")
        out.extend(self.adversary.problems(cfg.n, cfg.f))
        if "uniform" in self.starts:
            lo, hi = self.starts["uniform"]
            if lo < 0 or hi < lo:
                out.append(f"starts.uniform needs 0 <= lo <= hi, got {[lo, hi]}")
        else:
            for pid, t in self.starts.items():
                if not 1 <= pid <= cfg.n:
                    out.append(f"start for unknown pid {pid}")
                elif t < 0:
                    out.append(f"start time for p{pid} must be non-negative")
        if "random_rates" in self.clocks:
            if not self.clocks["random_rates"] or any(r <= 0 for r in self.clocks["random_rates"]):
                out.append("clocks.random_rates must be a non-empty list of positive rates")
            if self.clocks.get("segment", 1) <= 0:
                out.append("clocks.segment must be positive")
        else:
            for pid, segs in self.clocks.items():
                if not 1 <= pid <= cfg.n:
                    out.append(f"clock for unknown pid {pid}")
                elif any(r <= 0 for _, r in segs):
                    out.append(f"clock rates for p{pid} must be positive")
        return out

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, config=replace(self.config, seed=seed))

    def with_protocol(self, protocol: str) -> "Scenario":
        return replace(self, protocol=protocol)


@dataclass
class RunResult:
    scenario: Scenario
    trace: Trace
    status: str
    processes: dict
    end_time: Time


def resolve_starts(scn: Scenario, rng: random.Random) -> dict[int, Time]:
    n = scn.config.n
    if "uniform" in scn.starts:
        lo, hi = (as_time(x) for x in scn.starts["uniform"])
        return {pid: draw_time(rng, lo, hi) for pid in range(1, n + 1)}
    return {pid: as_time(t) for pid, t in scn.starts.items()}


def resolve_clocks(scn: Scenario, rng: random.Random) -> dict[int, ClockSchedule]:
    cfg = scn.config
    pids = range(1, cfg.n + 1)
    if "random_rates" in scn.clocks:
        rates = [as_time(r) for r in scn.clocks["random_rates"]]
        seg = as_time(scn.clocks.get("segment", cfg.gst or 1))
        out = {}
        for pid in pids:
            segs, t = [], 0
            while t < cfg.gst:
                segs.append((t, rng.choice(rates)))
                t += seg
            out[pid] = ClockSchedule(cfg.gst, segs or None)
        return out
    return {pid: ClockSchedule(cfg.gst, scn.clocks.get(pid)) for pid in pids}


def run(scn: Scenario, on_event: Optional[Callable[[SimEvent, dict], None]] = None,
        header: Optional[dict] = None) -> RunResult:
    """Execute ``scn``; ``on_event(event, processes)`` is called after every event."""
    problems = scn.problems()
    if problems:
        raise ConfigError("; ".join(problems))
    cfg = scn.config
    seed = cfg.seed
    setup_rng = random.Random(f"{seed}:setup")
    starts = resolve_starts(scn, setup_rng)
    clocks = resolve_clocks(scn, setup_rng)
    sim = Simulator(clocks)
    trace = Trace()
    byz = scn.adversary.byzantine
    correct = [p for p in range(1, cfg.n + 1) if p not in byz]

    if header is None:
        from .scenario import emit_dict
        header = emit_dict(scn)
    trace.record(0, None, "config", **header,
                 resolved={"starts": {str(p): fmt_time(t) for p, t in sorted(starts.items())},
                           "correct": correct})

    def record(kind, pid=None, **detail):
        trace.record(sim.now, pid, kind, **detail)

    net = Network(sim, cfg.gst, cfg.delta, correct, scn.adversary.rules,
                  random.Random(f"{seed}:net"), record, scn.theta)
    replica_cls = PROTOCOLS[scn.protocol]
    procs: dict[int, Process] = {}
    for pid in range(1, cfg.n + 1):
        behavior = make_behavior(byz[pid], pid, cfg.n, cfg.f) if pid in byz else None
        tag = "v" if behavior is None else "b"
        myval = (lambda x: lambda: x)(Value(f"{tag}{pid}"))
        procs[pid] = Process(pid, cfg, sim, net, trace, replica_cls, behavior, myval)

    ticks: dict[int, int] = {}
    for pid, proc in procs.items():
        if proc.silent:
            continue
        ticks[pid] = 1
        sim.schedule(clocks[pid].real(clocks[pid].local(0) + cfg.rho), pid, TICK)
    for pid, t in sorted(starts.items()):
        sim.schedule(t, pid, START)

    deciders = [procs[p] for p in correct]

    def dispatch(ev: SimEvent) -> None:
        procs[ev.target].handle(ev)
        if ev.kind == TICK:
            ticks[ev.target] += 1
            clock = clocks[ev.target]
            sim.schedule(clock.real(clock.local(0) + ticks[ev.target] * cfg.rho), ev.target, TICK)
        if on_event is not None:
            on_event(ev, procs)

    stop = None
    if replica_cls is not None and scn.stop_on_decide:
        # keep going until late starters have called start(), so S_last is defined
        def stop():
            return all(p.replica.decided is not None and (p.sync.started or p.pid not in starts)
                       for p in deciders)

    horizon = cfg.horizon
    if horizon is None:
        horizon = cfg.default_horizon(max(starts.values(), default=0))

    def idle() -> bool:
        # only ticks remain: quiescent unless some tick would still retransmit
        for p in procs.values():
            if p.silent or (p.behavior is not None and not p.behavior.active(sim.now)):
                continue
            if sim.timer_enabled(p.pid, VIEW_TIMER) or p.sync.max_views[p.pid - 1] > 0:
                return False
        return True

    status = sim.run(dispatch, horizon, stop=stop, idle=idle)
    trace.record(sim.now, None, "end", status=status, events=sim.events_run)
    return RunResult(scn, trace, status, procs, sim.now)


__all__ = ["PROTOCOLS", "Scenario", "RunResult", "run", "resolve_starts", "resolve_clocks"]
