"""Run reports (text and JSON) and the cross-protocol summary table."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .checker import FAIL, PASS, VACUOUS, CheckResult
from .sim import Time, fmt_time


@dataclass
class Report:
    protocol: str
    seed: int
    status: str                     # how the run ended: stopped | quiescent | horizon
    V: Optional[int]
    verdicts: list = field(default_factory=list)
    views: list = field(default_factory=list)        # [(v, E_first, E_last)]
    decisions: list = field(default_factory=list)    # [(pid, t, v, value, path)]
    S_last: Optional[Time] = None
    warnings: int = 0
    preconditions: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(v.status == FAIL for v in self.verdicts)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol, "seed": self.seed, "status": self.status, "V": self.V,
            "S_last": fmt_time(self.S_last), "warnings": self.warnings,
            "preconditions": self.preconditions,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "views": [{"v": v, "E_first": fmt_time(a), "E_last": fmt_time(b)} for v, a, b in self.views],
            "decisions": [{"pid": p, "t": fmt_time(t), "v": v, "value": x, "path": path}
                          for p, t, v, x, path in self.decisions],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=False)

    def to_text(self) -> str:
        lines = [f"protocol {self.protocol}  seed {self.seed}  run {self.status}  V={self.V}"
                 f"  warnings={self.warnings}"]
        if self.preconditions:
            lines.append("hypotheses: " + ", ".join(f"{k}: {'yes' if ok else 'no'}"
                                                    for k, ok in self.preconditions.items()))
        width = max((len(v.id) for v in self.verdicts), default=10)
        for v in self.verdicts:
            extra = ""
            if v.bound is not None:
                extra = f"  [observed {fmt_time(v.observed)} <= bound {fmt_time(v.bound)}]"
            lines.append(f"  {v.status.upper():8} {v.id:<{width}}  {v.note}{extra}")
        if self.views:
            lines.append("  view  E_first  E_last")
            for v, a, b in self.views[:30]:
                lines.append(f"  {v:>4}  {fmt_time(a)!s:>7}  {fmt_time(b)!s:>6}")
        for p, t, v, x, path in self.decisions:
            lines.append(f"  p{p} decided {x} in view {v} at {fmt_time(t)} ({path})")
        return "\n".join(lines)


def hypotheses(cfg, protocol: str, theta=None) -> dict[str, bool]:
    """The timeout hypotheses of the bounds, evaluated at view 1."""
    d = cfg.delta
    F1 = cfg.F(1)
    out = {"F(1) > 2delta": F1 > 2 * d}
    if protocol == "hotstuff3":
        out["F(1) > 6delta"] = F1 > 6 * d
        out["F(1) > 7delta"] = F1 > 7 * d
    elif protocol == "hotstuff2" and cfg.newleader_timeout is not None:
        Fp = cfg.newleader_timeout(1)
        out["F_p(1) > 3delta"] = Fp > 3 * d
        out["F(1) - F_p(1) > 5delta"] = F1 - Fp > 5 * d
    elif protocol in ("pbft", "sbft-no-timer"):
        out["F(1) > 6delta"] = F1 > 6 * d
    if protocol == "sbft" and cfg.fast_path_timeout is not None:
        Ff = cfg.fast_path_timeout(1)
        out["F(1) > 4delta"] = F1 > 4 * d
        out["F_f(1) > 2delta"] = Ff > 2 * d
        out["F(1) - F_f(1) > 5delta"] = F1 - Ff > 5 * d
    if protocol == "tendermint" and cfg.lock_timeout is not None and theta is not None:
        Fl = cfg.lock_timeout(1)
        out["F_l(1) > 2delta + 2theta"] = Fl > 2 * d + 2 * theta
        out["F(1) - F_l(1) > 2delta + theta"] = F1 - Fl > 2 * d + theta
    return out


def build_report(scn, run_status: str, res: Optional[CheckResult], trace) -> Report:
    cfg = scn.config
    rep = Report(scn.protocol, cfg.seed, run_status, None,
                 warnings=sum(1 for r in trace.records if r.kind == "warning"),
                 preconditions=hypotheses(cfg, scn.protocol, scn.theta))
    if res is None:
        return rep
    m = res.metrics
    rep.V = res.V
    rep.verdicts = res.verdicts
    rep.S_last = m.S_last
    rep.views = [(v, m.E_first[v], m.E_last.get(v)) for v in sorted(m.E_first)]
    rep.decisions = [(p, d["t"], d["v"], d["value"], d.get("path", "slow"))
                     for p, d in sorted(m.decisions.items())]
    return rep


def emit_summary(reports: list[Report]) -> str:
    """One row per run: decision latency after the last start against each latency bound."""
    if not reports:
        raise ValueError("no reports to summarize")
    rows = []
    for r in reports:
        last = max((t for _, t, *_ in r.decisions), default=None)
        lat = None if last is None or r.S_last is None else last - r.S_last
        cells = []
        for v in r.verdicts:
            if not v.id.startswith("latency:"):
                continue
            name = v.id.split(":", 1)[1]
            if v.status == VACUOUS:
                cells.append(f"{name}=n/a*")
            else:
                mark = "" if v.status == PASS else "!"
                cells.append(f"{name}={fmt_time(v.bound)}{mark}")
        fails = sum(1 for v in r.verdicts if v.status == FAIL)
        rows.append([r.protocol, str(r.seed), str(r.V), str(len(r.decisions)),
                     str(fmt_time(last)), str(fmt_time(lat)), "ok" if not fails else f"{fails} FAIL",
                     "  ".join(cells)])
    head = ["protocol", "seed", "V", "decided", "last decide", "after S_last", "checks", "bounds"]
    widths = [max(len(x[i]) for x in rows + [head]) for i in range(len(head) - 1)]
    out = ["  ".join(h.ljust(w) for h, w in zip(head, widths)) + "  " + head[-1]]
    for row in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)) + "  " + row[-1])
    out.append("(* = hypotheses unmet or trace too short; ! = bound exceeded)")
    return "\n".join(out)
