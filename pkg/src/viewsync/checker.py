"""Offline trace analysis.

Everything here is a pure function of a :class:`~viewsync.trace.Trace`: the
synchronizer properties, the safety invariants and the latency deadlines of
each protocol. Verdicts are three-valued; ``vacuous`` means the hypotheses did
not hold or the trace ended before the deadline could be judged.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Optional

from .common import leader
from .sim import Time, as_time, fmt_time
from .trace import Trace

PASS, FAIL, VACUOUS = "pass", "fail", "vacuous"


@dataclass
class Verdict:
    id: str
    status: str
    note: str = ""
    bound: Optional[Time] = None
    observed: Optional[Time] = None

    def to_dict(self) -> dict:
        return {"id": self.id, "status": self.status, "note": self.note,
                "bound": fmt_time(self.bound), "observed": fmt_time(self.observed)}


def _verdict(id: str, failures: list[str], checked: int, empty_note="nothing to check") -> Verdict:
    if failures:
        more = f" (+{len(failures) - 3} more)" if len(failures) > 3 else ""
        return Verdict(id, FAIL, "; ".join(failures[:3]) + more)
    if checked == 0:
        return Verdict(id, VACUOUS, empty_note)
    return Verdict(id, PASS, f"{checked} checked")


# ---------------------------------------------------------------------------
# metrics

@dataclass
class SyncMetrics:
    correct: list[int]
    t_end: Time
    entries: dict = field(default_factory=dict)      # pid -> [(t, seq, v)]
    E: dict = field(default_factory=dict)            # (pid, v) -> t
    E_first: dict = field(default_factory=dict)
    E_last: dict = field(default_factory=dict)       # only views every correct process entered
    S: dict = field(default_factory=dict)            # pid -> start time
    decisions: dict = field(default_factory=dict)    # pid -> decide record detail + t
    _gv_times: list = field(default_factory=list)
    _gv_views: list = field(default_factory=list)

    @property
    def S_first(self) -> Optional[Time]:
        return min(self.S.values()) if self.S else None

    @property
    def S_last(self) -> Optional[Time]:
        """Latest start, or None while some correct process never started."""
        if len(self.S) < len(self.correct):
            return None
        return max(self.S.values())

    def tfk(self, k: int) -> Optional[Time]:
        times = sorted(self.S.values())
        return times[k - 1] if 1 <= k <= len(times) else None

    def GV(self, t: Time) -> int:
        i = bisect.bisect_right(self._gv_times, t)
        return self._gv_views[i - 1] if i else 0

    def LV(self, pid: int, t: Time) -> int:
        best = 0
        for et, _, v in self.entries.get(pid, ()):
            if et > t:
                break
            best = v
        return best

    @property
    def max_view(self) -> int:
        return max(self.E_first, default=0)


def compute_metrics(trace: Trace) -> SyncMetrics:
    header = trace.header()
    correct = list(header["resolved"]["correct"])
    cset = set(correct)
    end = [r for r in trace.records if r.kind == "end"]
    t_end = end[-1].t if end else (trace.records[-1].t if trace.records else 0)
    m = SyncMetrics(correct, t_end)
    for p in correct:
        m.entries[p] = []
    gv = []
    for r in trace.records:
        if r.pid not in cset:
            continue
        if r.kind == "enter":
            v = int(r.detail["v"])
            m.entries[r.pid].append((r.t, r.seq, v))
            m.E.setdefault((r.pid, v), r.t)
            if v not in m.E_first:
                m.E_first[v] = r.t
            gv.append((r.t, v))
        elif r.kind == "start":
            m.S.setdefault(r.pid, r.t)
        elif r.kind == "decide" and r.pid not in m.decisions:
            m.decisions[r.pid] = dict(r.detail, t=r.t)
    for v in m.E_first:
        times = [m.E.get((p, v)) for p in correct]
        if all(t is not None for t in times):
            m.E_last[v] = max(times)
    best = 0
    for t, v in gv:
        best = max(best, v)
        if m._gv_times and m._gv_times[-1] == t:
            m._gv_views[-1] = best
        else:
            m._gv_times.append(t)
            m._gv_views.append(best)
    return m


# ---------------------------------------------------------------------------
# synchronizer properties

def check_property_1(m: SyncMetrics) -> Verdict:
    failures, checked = [], 0
    for p, ents in m.entries.items():
        for (t0, _, v0), (t1, _, v1) in zip(ents, ents[1:]):
            checked += 1
            if v1 <= v0:
                failures.append(f"p{p} entered {v1} at {fmt_time(t1)} after {v0}")
    return _verdict("property-1", failures, checked)


def window(m: SyncMetrics, delta: Time, V: int) -> list[int]:
    """Views from V that every correct process should have entered by the trace end."""
    top = [v for v, t in m.E_first.items() if v >= V and t + 2 * delta <= m.t_end]
    return list(range(V, max(top) + 1)) if top else []


def _props_3_to_5(m: SyncMetrics, cfg, V: int) -> dict[str, Verdict]:
    d = 2 * cfg.delta
    views = window(m, cfg.delta, V)
    f3, f4, f5, fo = [], [], [], []
    n5 = no = 0
    for v in views:
        missing = [p for p in m.correct if (p, v) not in m.E]
        if missing:
            f3.append(f"view {v} never entered by {missing}")
            continue
        if m.E_last[v] > m.E_first[v] + d:
            f4.append(f"view {v}: E_last {fmt_time(m.E_last[v])} > E_first {fmt_time(m.E_first[v])} + {fmt_time(d)}")
        nxt = m.E_first.get(v + 1)
        if nxt is not None:
            n5 += 1
            if nxt < m.E_first[v] + cfg.F(v):
                f5.append(f"E_first({v + 1})={fmt_time(nxt)} < E_first({v}) + F({v})")
            no += 1
            if nxt - m.E_last[v] < cfg.F(v) - d:
                fo.append(f"E_first({v + 1}) - E_last({v}) < F({v}) - 2delta")
    return {
        "property-3": _verdict("property-3", f3, len(views)),
        "property-4": _verdict("property-4", f4, len(views) - len(f3)),
        "property-5": _verdict("property-5", f5, n5),
        "overlap": _verdict("overlap", fo, no),
    }


def detect_V(m: SyncMetrics, cfg) -> Optional[int]:
    """Smallest view entered at or after GST from which Properties 3-5 hold."""
    for v in sorted(m.E_first):
        if m.E_first[v] < cfg.gst:
            continue
        res = _props_3_to_5(m, cfg, v)
        if all(res[k].status != FAIL for k in ("property-3", "property-4", "property-5")):
            return v
    return None


def check_properties_1_to_5(m: SyncMetrics, cfg, V: Optional[int] = None) -> tuple[Optional[int], list[Verdict]]:
    out = [check_property_1(m)]
    if V is None:
        V = detect_V(m, cfg)
        if V is None:
            cands = [v for v in sorted(m.E_first) if m.E_first[v] >= cfg.gst]
            if not cands:
                out.append(Verdict("property-2", FAIL, "not synchronized within horizon: no view entered after GST"))
                return None, out
            # report the failures against the first candidate
            res = _props_3_to_5(m, cfg, cands[0])
            out.append(Verdict("property-2", PASS, f"V candidate {cands[0]}"))
            out.extend(res.values())
            out.append(Verdict("synchronization", FAIL, "not synchronized within horizon"))
            return None, out
    first = m.E_first.get(V)
    if first is None:
        out.append(Verdict("property-2", FAIL, f"view {V} never entered"))
        return V, out
    ok = first >= cfg.gst
    out.append(Verdict("property-2", PASS if ok else FAIL,
                       f"V={V}, E_first(V)={fmt_time(first)} {'>=' if ok else '<'} GST={fmt_time(cfg.gst)}"))
    out.extend(_props_3_to_5(m, cfg, V).values())
    return V, out


def check_property_A(m: SyncMetrics, cfg, V: Optional[int]) -> list[Verdict]:
    if V is None:
        return [Verdict("property-A", VACUOUS, "no V"), Verdict("last-entry-sum", VACUOUS, "no V")]
    fa, na, fs, ns = [], 0, [], 0
    for v in window(m, cfg.delta, V):
        last = m.E_last.get(v)
        if last is None:
            continue
        deadline = last + cfg.F(v) + cfg.delta
        if deadline <= m.t_end:
            na += 1
            nxt = m.E_last.get(v + 1)
            if nxt is None:
                fa.append(f"view {v + 1} not entered by every correct process by {fmt_time(deadline)}")
            elif nxt > deadline:
                fa.append(f"E_last({v + 1})={fmt_time(nxt)} > {fmt_time(deadline)}")
        bound, w = last, v
        while True:
            bound = bound + cfg.F(w) + cfg.delta
            w += 1
            if bound > m.t_end:
                break
            ns += 1
            got = m.E_last.get(w)
            if got is None or got > bound:
                shown = "never" if got is None else fmt_time(got)
                fs.append(f"E_last({w})={shown} > E_last({v}) + sum = {fmt_time(bound)}")
    return [_verdict("property-A", fa, na, "trace ends before any deadline"),
            _verdict("last-entry-sum", fs, ns, "trace ends before any deadline")]


def check_property_B(m: SyncMetrics, cfg) -> Verdict:
    s_first, s_last = m.S_first, m.S_last
    if s_last is None:
        return Verdict("property-B", VACUOUS, "some correct process never started")
    if s_first < cfg.gst:
        return Verdict("property-B", VACUOUS, "S_first < GST")
    if not cfg.F(1) > 2 * cfg.delta:
        return Verdict("property-B", VACUOUS, "F(1) <= 2delta")
    bound = s_last + cfg.delta
    _, props = check_properties_1_to_5(m, cfg, V=1)
    bad = [v.id for v in props if v.status == FAIL]
    last = m.E_last.get(1)
    if last is None:
        if bound <= m.t_end:
            return Verdict("property-B", FAIL, "view 1 not entered by every correct process", bound)
        return Verdict("property-B", VACUOUS, "trace ends before the deadline", bound)
    if bad:
        return Verdict("property-B", FAIL, f"V=1 violates {bad}", bound, last)
    ok = last <= bound
    return Verdict("property-B", PASS if ok else FAIL, "E_last(1) <= S_last + delta", bound, last)


def property_C_view(m: SyncMetrics, cfg) -> Optional[int]:
    tk = m.tfk(cfg.f + 1)
    if tk is None or tk > cfg.gst + cfg.rho:
        return None
    v = m.GV(cfg.gst + cfg.rho) + 1
    return v if cfg.F(v) > 2 * cfg.delta else None


def check_property_C(m: SyncMetrics, cfg) -> Verdict:
    V = property_C_view(m, cfg)
    if V is None:
        return Verdict("property-C", VACUOUS, "needs tfk(f+1) <= GST+rho and F(GV(GST+rho)+1) > 2delta")
    bound = cfg.gst + cfg.rho + cfg.F(V - 1) + 3 * cfg.delta
    last = m.E_last.get(V)
    if last is None:
        if bound <= m.t_end:
            return Verdict("property-C", FAIL, f"view {V} not entered by every correct process", bound)
        return Verdict("property-C", VACUOUS, "trace ends before the deadline", bound)
    _, props = check_properties_1_to_5(m, cfg, V=V)
    bad = [v.id for v in props if v.status == FAIL]
    if bad:
        return Verdict("property-C", FAIL, f"V={V} violates {bad}", bound, last)
    return Verdict("property-C", PASS if last <= bound else FAIL,
                   f"V={V}, E_last(V) <= GST + rho + F(V-1) + 3delta", bound, last)


# ---------------------------------------------------------------------------
# safety

LOCK_PHASE = {"hotstuff3": "precommitted"}
ORDERS = {  # (lower, higher) pairs that must hold in every state record
    "hotstuff3": [("lv", "pv"), ("pv", "cv")],
    "hotstuff2": [("lv", "pv"), ("pv", "cv")],
    "tendermint": [("lv", "pv"), ("pv", "cv")],
    "pbft": [("lv", "cv")],
    "sbft": [("lv", "prev"), ("prev", "cv")],
    "sbft-no-timer": [("lv", "prev"), ("prev", "cv")],
}


def check_safety(trace: Trace, protocol: str, cfg) -> list[Verdict]:
    header = trace.header()
    cset = set(header["resolved"]["correct"])
    decides = [r for r in trace.records if r.kind == "decide" and r.pid in cset]
    values = {r.detail["value"] for r in decides}
    out = [Verdict("agreement", FAIL if len(values) > 1 else (PASS if decides else VACUOUS),
                   f"decided values {sorted(values)}" if values else "no decisions")]
    invalid = [r for r in decides if not r.detail["valid"]]
    out.append(Verdict("validity", FAIL if invalid else (PASS if decides else VACUOUS),
                       f"invalid decisions by {[r.pid for r in invalid]}" if invalid else f"{len(decides)} decisions"))

    prepared: dict[int, set] = {}
    for r in trace.records:
        if r.kind == "prepare" and r.pid in cset:
            prepared.setdefault(r.detail["v"], set()).add(r.detail["value"])
    bad = [f"view {v}: {sorted(xs)}" for v, xs in prepared.items() if len(xs) > 1]
    out.append(_verdict("prepared-uniqueness", bad, len(prepared), "nothing prepared"))

    pairs = ORDERS.get(protocol, [])
    f_ord, last, n_ord = [], {}, 0
    for r in trace.records:
        if r.kind != "state" or r.pid not in cset:
            continue
        n_ord += 1
        st = r.detail
        for lo, hi in pairs:
            if st[lo] > st[hi]:
                f_ord.append(f"p{r.pid} at {fmt_time(r.t)}: {lo}={st[lo]} > {hi}={st[hi]}")
        prev = last.get(r.pid)
        if prev is not None:
            for k, val in st.items():
                if val < prev[k]:
                    f_ord.append(f"p{r.pid} at {fmt_time(r.t)}: {k} decreased {prev[k]} -> {val}")
        last[r.pid] = st
    out.append(_verdict("state-order", f_ord, n_ord, "no state records"))

    want = LOCK_PHASE.get(protocol, "prepared")
    locks = [r for r in trace.records if r.kind == "lock" and r.pid in cset]
    out.append(_verdict("lock-phase", [f"p{r.pid} locked in phase {r.detail['phase']}"
                                       for r in locks if r.detail["phase"] != want], len(locks), "no locks"))

    fast = [r for r in decides if r.detail.get("path") == "fast"]
    if fast:
        sent = {(r.pid, r.detail["msg"]) for r in trace.records if r.kind == "send"}
        f_fast = []
        for r in fast:
            msg = f"PREPARED({r.detail['v']},#{r.detail['value']})"
            missing = [p for p in range(1, cfg.n + 1) if (p, msg) not in sent]
            if missing:
                f_fast.append(f"p{r.pid} decided fast without {msg} from {missing}")
        out.append(_verdict("fast-path-evidence", f_fast, len(fast)))
    out.append(check_envelopes(trace, cfg, cset))
    return out


def check_envelopes(trace: Trace, cfg, cset) -> Verdict:
    failures, checked = [], 0
    for r in trace.records:
        if r.kind != "send":
            continue
        to, at = r.detail["to"], r.detail["at"]
        at = None if at is None else as_time(at)
        if to == r.pid:
            checked += 1
            if at != r.t:
                failures.append(f"self-send by p{r.pid} at {fmt_time(r.t)} delivered at {fmt_time(at)}")
        elif r.pid in cset and to in cset and r.t >= cfg.gst and r.detail.get("ch") != "rbc":
            checked += 1
            if at is None or at > r.t + cfg.delta:
                failures.append(f"p{r.pid}->p{to} at {fmt_time(r.t)} delivered at {fmt_time(at)}")
    return _verdict("envelope", failures, checked)


# ---------------------------------------------------------------------------
# latency

def _sum(cfg, lo: int, hi: int) -> Time:
    """sum over k in [lo, hi] of F(k) + delta."""
    return sum((cfg.F(k) + cfg.delta for k in range(lo, hi + 1)), 0)


def _deadline_verdict(id: str, m: SyncMetrics, bound: Time, note: str, path: Optional[str] = None) -> Verdict:
    times = {p: m.decisions[p]["t"] for p in m.correct if p in m.decisions}
    latest = max(times.values(), default=None)
    if len(times) < len(m.correct):
        if bound <= m.t_end:
            missing = [p for p in m.correct if p not in times]
            return Verdict(id, FAIL, f"{note}; {missing} undecided at the deadline", bound, latest)
        return Verdict(id, VACUOUS, f"{note}; trace ends before the deadline", bound, latest)
    if latest > bound:
        late = [p for p, t in times.items() if t > bound]
        return Verdict(id, FAIL, f"{note}; {late} decided late", bound, latest)
    if path is not None:
        wrong = [p for p in m.correct if m.decisions[p].get("path") != path]
        if wrong:
            return Verdict(id, FAIL, f"{note}; {wrong} decided off the {path} path", bound, latest)
    return Verdict(id, PASS, note, bound, latest)


def _view_claims(protocol: str, cfg, theta, all_correct: bool):
    """Per-view latency theorems: (id, precondition(v), deadline(E_last, v), path)."""
    d = cfg.delta
    F = cfg.F
    Fp, Ff, Fl = cfg.newleader_timeout, cfg.fast_path_timeout, cfg.lock_timeout
    if protocol == "hotstuff3":
        return [("hs3.view", lambda v: F(v) > 7 * d, lambda e, v: e + 5 * d, None)]
    if protocol == "hotstuff2":
        return [("hs2.view", lambda v: Fp(v) > 3 * d and F(v) - Fp(v) > 5 * d,
                 lambda e, v: e + Fp(v) + 3 * d, None)]
    if protocol == "pbft":
        return [("pbft.view", lambda v: F(v) > 6 * d, lambda e, v: e + 4 * d, None)]
    if protocol in ("sbft", "sbft-no-timer"):
        tag = "sbft" if protocol == "sbft" else "sbft-nt"
        claims = []
        if all_correct:
            claims.append((f"{tag}.fast.view", lambda v: F(v) > 5 * d, lambda e, v: e + 3 * d, None))
        if protocol == "sbft":
            claims.append(("sbft.slow.view", lambda v: Ff(v) > 2 * d and F(v) - Ff(v) > 5 * d,
                           lambda e, v: e + Ff(v) + 3 * d, None))
        else:
            claims.append(("sbft-nt.view", lambda v: F(v) > 6 * d, lambda e, v: e + 4 * d, None))
        return claims
    if protocol == "tendermint":
        return [("tm.theorem", lambda v: Fl(v) > 2 * d + 2 * theta and F(v) - Fl(v) > 2 * d + theta,
                 lambda e, v: e + _sum(cfg, v, v + 3 * cfg.f - 1) + 3 * theta, None)]
    return []


def _tm_lock_condition(trace: Trace, cset, v: int, lead: int) -> bool:
    """Leader's prepared view on entering v is at least every correct lock from earlier views."""
    lock_max = 0
    lead_pv = 0
    for r in trace.records:
        if r.pid not in cset:
            continue
        if r.kind == "lock" and r.detail["v"] < v:
            lock_max = max(lock_max, r.detail["v"])
        elif r.kind == "prepare" and r.pid == lead and r.detail["v"] < v:
            lead_pv = max(lead_pv, r.detail["v"])
    return lock_max <= lead_pv


def check_tm_validall(trace: Trace, m: SyncMetrics, cfg, theta, byzantine=(),
                      V: Optional[int] = None) -> Verdict:
    """A correct lock in a qualifying view v means every correct process leaves v with prepared_view = v."""
    d, Fl = cfg.delta, cfg.lock_timeout
    if V is None:
        return Verdict("tm.validall", VACUOUS, "no V detected")
    cset = set(m.correct)
    byz = set(byzantine)

    def qualifies(v):
        return (v >= V and leader(v, cfg.n) not in byz and Fl(v) > 2 * d + 2 * theta
                and cfg.F(v) - Fl(v) > 2 * d + theta)

    locked_views = {r.detail["v"] for r in trace.records
                    if r.kind == "lock" and r.pid in cset and qualifies(r.detail["v"])}
    pv: dict[int, int] = {}
    current: dict[int, int] = {}
    failures, checked = [], 0
    for r in trace.records:
        if r.pid not in cset:
            continue
        if r.kind == "state":
            pv[r.pid] = r.detail.get("pv", 0)
        elif r.kind == "enter":
            v = current.get(r.pid)
            if v in locked_views:
                checked += 1
                if pv.get(r.pid, 0) != v:
                    failures.append(f"p{r.pid} left view {v} with prepared_view {pv.get(r.pid, 0)}")
            current[r.pid] = r.detail["v"]
    return _verdict("tm.validall", failures, checked, "no correct process left a qualifying locked view")


def check_latency(trace: Trace, m: SyncMetrics, protocol: str, cfg, theta=None,
                  byzantine=(), V: Optional[int] = None) -> list[Verdict]:
    if protocol == "none":
        return []
    d = cfg.delta
    F = cfg.F
    n, f = cfg.n, cfg.f
    byz = set(byzantine)
    all_correct = not byz
    out: list[Verdict] = []

    def correct_leader(v):
        return leader(v, n) not in byz

    # per-view theorems, at the first qualifying view from V on
    claims = _view_claims(protocol, cfg, theta, all_correct)
    if protocol == "tendermint":
        Fl = cfg.lock_timeout
        claims.insert(0, ("tm.lemma", lambda v: Fl(v) > 2 * d + 2 * theta and F(v) > 2 * d + 3 * theta,
                          lambda e, v: e + 3 * theta, None))
    for cid, pre, deadline, path in claims:
        if V is None:
            out.append(Verdict(f"latency:{cid}", VACUOUS, "no V detected"))
            continue
        chosen = None
        for v in range(V, m.max_view + 1):
            if v in m.E_last and correct_leader(v) and pre(v):
                if cid == "tm.lemma" and not _tm_lock_condition(trace, set(m.correct), v, leader(v, n)):
                    continue
                chosen = v
                break
        if chosen is None:
            out.append(Verdict(f"latency:{cid}", VACUOUS, "no view from V with a correct leader meets the hypotheses"))
            continue
        out.append(_deadline_verdict(f"latency:{cid}", m, deadline(m.E_last[chosen], chosen),
                                     f"view {chosen}", path))

    # start-anchored corollaries
    s_first, s_last = m.S_first, m.S_last
    fav = s_last is not None and s_first >= cfg.gst
    lead1 = correct_leader(1)
    first_correct = next(v for v in range(1, n + 1) if correct_leader(v))
    Fp, Ff, Fl = cfg.newleader_timeout, cfg.fast_path_timeout, cfg.lock_timeout
    cors = []
    if protocol == "hotstuff3":
        cors = [("hs3.favorable", F(1) > 6 * d and lead1, lambda: s_last + 5 * d, None),
                ("hs3.from1", F(1) > 7 * d, lambda: s_last + _sum(cfg, 1, f) + 6 * d, None)]
    elif protocol == "hotstuff2":
        cors = [("hs2.favorable", F(1) > 5 * d and lead1, lambda: s_last + 4 * d, None),
                ("hs2.from1", Fp(1) > 3 * d and F(1) - Fp(1) > 5 * d,
                 lambda: s_last + _sum(cfg, 1, f) + Fp(f + 1) + 4 * d, None)]
    elif protocol == "pbft":
        cors = [("pbft.favorable", F(1) > 5 * d and lead1, lambda: s_last + 4 * d, None),
                ("pbft.from1", F(1) > 6 * d, lambda: s_last + _sum(cfg, 1, f) + 5 * d, None)]
    elif protocol == "sbft":
        cors = [("sbft.favorable", all_correct and F(1) > 4 * d, lambda: s_last + 3 * d, None)]
    elif protocol == "tendermint":
        cors = [("tm.favorable", Fl(1) > 2 * d + 2 * theta and F(1) > 2 * d + 3 * theta and lead1,
                 lambda: s_last + d + 3 * theta, None),
                ("tm.from1", Fl(1) > 2 * d + 2 * theta and F(1) - Fl(1) > 2 * d + theta,
                 lambda: s_last + d + _sum(cfg, 1, first_correct + 3 * f - 1) + 3 * theta, None)]
    for cid, pre, bound, path in cors:
        if not fav:
            out.append(Verdict(f"latency:{cid}", VACUOUS, "needs S_first >= GST and every correct start"))
        elif not pre:
            out.append(Verdict(f"latency:{cid}", VACUOUS, "hypotheses unmet (timeouts or leader(1) correct)"))
        else:
            out.append(_deadline_verdict(f"latency:{cid}", m, bound(), "from S_last", path))

    # GST-anchored worst case
    if protocol in ("hotstuff3", "hotstuff2"):
        cid = "hs3.worst" if protocol == "hotstuff3" else "hs2.worst"
        tk = m.tfk(f + 1)
        v = m.GV(cfg.gst + cfg.rho) + 1
        if tk is None or tk > cfg.gst + cfg.rho:
            out.append(Verdict(f"latency:{cid}", VACUOUS, "needs tfk(f+1) <= GST+rho"))
        elif protocol == "hotstuff3":
            if F(v) > 7 * d:
                out.append(_deadline_verdict(f"latency:{cid}", m,
                                             cfg.gst + cfg.rho + _sum(cfg, v - 1, v + f - 1) + 7 * d,
                                             f"from GST+rho, v={v}"))
            else:
                out.append(Verdict(f"latency:{cid}", VACUOUS, "F(v) <= 7delta"))
        else:
            if Fp(v) > 3 * d and F(v) - Fp(v) > 5 * d:
                out.append(_deadline_verdict(f"latency:{cid}", m,
                                             cfg.gst + cfg.rho + _sum(cfg, v - 1, v + f - 1) + Fp(v + f) + 5 * d,
                                             f"from GST+rho, v={v}"))
            else:
                out.append(Verdict(f"latency:{cid}", VACUOUS, "timeout hypotheses unmet"))
    return out


# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    V: Optional[int]
    metrics: SyncMetrics
    verdicts: list

    @property
    def failed(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == FAIL]

    def get(self, id: str) -> Verdict:
        for v in self.verdicts:
            if v.id == id:
                return v
        raise KeyError(id)


def check_trace(trace: Trace) -> CheckResult:
    from .scenario import parse_dict
    header = {k: v for k, v in trace.header().items() if k != "resolved"}
    scn = parse_dict(header)
    cfg = scn.config
    m = compute_metrics(trace)
    V, verdicts = check_properties_1_to_5(m, cfg)
    verdicts.extend(check_property_A(m, cfg, V))
    verdicts.append(check_property_B(m, cfg))
    verdicts.append(check_property_C(m, cfg))
    if scn.protocol != "none":
        verdicts.extend(check_safety(trace, scn.protocol, cfg))
        verdicts.extend(check_latency(trace, m, scn.protocol, cfg, scn.theta,
                                      scn.adversary.byzantine, V))
        if scn.protocol == "tendermint":
            verdicts.append(check_tm_validall(trace, m, cfg, scn.theta, scn.adversary.byzantine, V))
    else:
        verdicts.append(check_envelopes(trace, cfg, set(m.correct)))
    return CheckResult(V, m, verdicts)
